#include <cstdio>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "lipfrac/config.hpp"
#include "lipfrac/driver.hpp"
#include "lipfrac/error.hpp"
#include "lipfrac/lipmesh.hpp"
#include "lipfrac/mesh_builders.hpp"

using namespace lipfrac;

namespace {

int cmd_check(const std::string& path) {
  const SimulationConfig cfg = load_config(path);
  const Mesh mesh = load_mesh(cfg.mesh_path, cfg.mesh_format, cfg.physical_tags);
  const MaterialParams p = cfg.material();
  const WaveSpeeds ws = wave_speeds(p);
  const TimeControl tc = critical_timestep(mesh, p, cfg.cfl_factor, cfg.t_end);
  const double stable = stable_timestep_estimate(mesh, p);
  std::printf("lambda      = %.6g Pa\n", p.lambda);
  std::printf("mu          = %.6g Pa\n", p.mu);
  std::printf("c_d         = %.6g m/s\n", ws.c_d);
  std::printf("c_s         = %.6g m/s\n", ws.c_s);
  std::printf("c_R         = %.6g m/s\n", ws.c_R);
  std::printf("Yc          = %.6g J/m^3\n", p.Yc);
  std::printf("dt          = %.6g s\n", tc.dt);
  std::printf("h_min       = %.6g m\n", min_element_size(mesh));
  std::printf("n_steps     = %ld\n", tc.n_steps);
  std::printf("dt_stable   = %.6g s (estimate)\n", stable);
  if (tc.dt > stable) {
    std::printf("warning: dt exceeds the stability estimate%s\n",
                cfg.stability_check ? "; run will refuse to start" : "");
  }
  // Constructing the integrator validates the boundary conditions against the mesh.
  ExplicitDynamics(mesh, p, cfg.bcs, tc.dt);
  std::printf("config OK\n");
  return 0;
}

int cmd_run(const std::string& path, bool quiet) {
  const SimulationConfig cfg = load_config(path);
  Simulation sim(cfg);
  RunOptions opts;
  opts.log = quiet ? nullptr : &std::cout;
  const RunSummary s = sim.run(opts);
  std::printf("finished: %ld steps, dt = %.6g s, wall time %.2f s, output in %s\n", s.steps, s.dt, s.wall_time,
              cfg.output_dir.string().c_str());
  if (s.t_branch) std::printf("t_br = %.6g s\n", *s.t_branch);
  return 0;
}

int cmd_mesh_info(const std::string& path, const std::string& format) {
  const MeshFormat fmt = format.empty() ? mesh_format_from_path(path) : parse_mesh_format(format);
  const Mesh mesh = load_mesh(path, fmt);
  const LipMesh lip = build_lipmesh(mesh);
  std::printf("nodes       %d\n", mesh.num_nodes());
  std::printf("triangles   %d\n", mesh.num_elements());
  std::printf("facets      %zu\n", mesh.facets().size());
  std::printf("lip edges   %zu\n", lip.edges().size());
  std::printf("area        %.6g\n", mesh.total_area());
  std::printf("h_min       %.6g\n", min_element_size(mesh));
  for (const auto& tag : mesh.tags()) std::printf("tag %-12s %zu facets\n", tag.c_str(), mesh.facets_with_tag(tag).size());
  return 0;
}

int cmd_gen_mesh(const std::string& kind, double h, double width, double height, const std::string& out) {
  Mesh mesh = [&] {
    if (kind == "tension") return notched_tension_half_mesh(h);
    if (kind == "kalthoff") return kalthoff_half_mesh(h);
    if (kind == "rectangle") {
      const int nx = std::max(1, static_cast<int>(std::lround(width / h)));
      const int ny = std::max(1, static_cast<int>(std::lround(height / h)));
      return rectangle_mesh(width, height, nx, ny);
    }
    throw ArgumentError("unknown mesh kind '" + kind + "' (tension|kalthoff|rectangle)");
  }();
  write_native_mesh(mesh, out);
  std::printf("wrote %s: %d nodes, %d triangles\n", out.c_str(), mesh.num_nodes(), mesh.num_elements());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explicit dynamic fracture with Lipschitz-constrained damage"};
  app.require_subcommand(1);

  std::string config_path, mesh_path, format, kind, out;
  bool quiet = false;
  double h = 1e-3, width = 0.1, height = 0.02;

  auto* run = app.add_subcommand("run", "Run a simulation");
  run->add_option("config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
  run->add_flag("-q,--quiet", quiet, "No per-output progress lines");

  auto* check = app.add_subcommand("check", "Validate a configuration and print derived quantities");
  check->add_option("config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);

  auto* info = app.add_subcommand("mesh-info", "Print mesh statistics");
  info->add_option("mesh", mesh_path, "Mesh file")->required()->check(CLI::ExistingFile);
  info->add_option("--format", format, "msh | native (default: from extension)");

  auto* gen = app.add_subcommand("gen-mesh", "Write a structured benchmark mesh in the native format");
  gen->add_option("kind", kind, "tension | kalthoff | rectangle")->required();
  gen->add_option("-s,--size", h, "Element size [m]")->check(CLI::PositiveNumber);
  gen->add_option("--width", width, "Rectangle width [m]")->check(CLI::PositiveNumber);
  gen->add_option("--height", height, "Rectangle height [m]")->check(CLI::PositiveNumber);
  gen->add_option("-o,--output", out, "Output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, quiet);
    if (*check) return cmd_check(config_path);
    if (*info) return cmd_mesh_info(mesh_path, format);
    if (*gen) return cmd_gen_mesh(kind, h, width, height, out);
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "error: %s (step %ld)\n", e.what(), e.step());
    return 3;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
