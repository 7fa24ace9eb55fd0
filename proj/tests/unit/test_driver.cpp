#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "../vtk_reader.hpp"
#include "lipfrac/driver.hpp"
#include "lipfrac/error.hpp"
#include "lipfrac/mesh_builders.hpp"

using namespace lipfrac;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("lipfrac_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

SimulationConfig tension_config(const std::filesystem::path& out, double t_end, int every) {
  SimulationConfig c;
  c.E = 32e9;
  c.nu = 0.2;
  c.rho = 2450;
  c.Gc = 3;
  c.l = 2.5e-3;
  c.cfl_factor = 0.35;
  c.t_end = t_end;
  c.output_dir = out;
  c.output_every = every;
  BoundaryCondition load;
  load.kind = BcKind::traction;
  load.component = 1;
  load.value = -2e6;
  load.tag = "load";
  BoundaryCondition sym;
  sym.kind = BcKind::displacement;
  sym.component = 1;
  sym.tag = "symmetry";
  c.bcs = {load, sym};
  c.postproc.notch_tip = Point(0.05, 0.02);
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Simulation, ZeroLoadStaysAtRest) {
  const auto dir = scratch("zero");
  auto c = tension_config(dir, 0, 10);
  c.bcs.resize(1);
  c.bcs[0].value = 0;
  Simulation sim(c, notched_tension_half_mesh(5e-3));
  for (int k = 0; k < 100; ++k) sim.step();
  EXPECT_EQ(sim.kinematics().u.lpNorm<Eigen::Infinity>(), 0.0);
  EXPECT_EQ(sim.damage().lpNorm<Eigen::Infinity>(), 0.0);
  EXPECT_EQ(sim.kinetic_energy(), 0.0);
  EXPECT_EQ(sim.energies().potential, 0.0);
  EXPECT_EQ(sim.external_work(), 0.0);
}

TEST(Simulation, OutputCadenceAndFiles) {
  const auto dir = scratch("cadence");
  const Mesh mesh = notched_tension_half_mesh(5e-3);
  auto c = tension_config(dir, 0, 7);
  Simulation probe(c, mesh);
  c.t_end = 40.5 * probe.time_control().dt;
  Simulation sim(c, mesh);
  const auto s = sim.run();
  EXPECT_EQ(s.steps, sim.time_control().n_steps);
  EXPECT_EQ(s.vtk_files, s.steps / 7 + 1);
  int files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) files += e.path().extension() == ".vtk";
  EXPECT_EQ(files, s.steps / 7 + 1);
  const std::string csv = slurp(dir / "series.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,E_kin,E_p,E_d,W_ext,a,v_tip_over_cR");
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_EQ(summary["steps"], s.steps);
  EXPECT_TRUE(summary["t_br"].is_null());
  EXPECT_TRUE(summary.contains("wall_time"));
  EXPECT_EQ(summary["config"]["material"]["Gc"], 3.0);
  std::ifstream vtk(dir / "snapshot_0000000.vtk");
  const auto g = lipfrac::testing::read_vtk(vtk);
  EXPECT_EQ(g.cells.size(), static_cast<std::size_t>(mesh.num_elements()));
}

TEST(Simulation, ElasticEnergyBalance) {
  // Before any damage, E_kin + E_p equals the work of the traction.
  auto c = tension_config(scratch("balance"), 0, 1);
  c.bcs[0].value = -1e5;
  const Mesh mesh = notched_tension_half_mesh(5e-3);
  Simulation sim(c, mesh);
  for (int k = 0; k < 300; ++k) sim.step();
  ASSERT_EQ(sim.damage().lpNorm<Eigen::Infinity>(), 0.0);
  const double total = sim.kinetic_energy() + sim.energies().potential;
  EXPECT_NEAR(total, sim.external_work(), 0.01 * sim.external_work());
}

TEST(Simulation, DamageGrowsAndStaysLipschitz) {
  auto c = tension_config(scratch("damage"), 0, 1);
  c.bcs[0].value = -6e6;
  Simulation sim(c, notched_tension_half_mesh(2.5e-3));
  double e_d = 0;
  Vector d_prev = sim.damage();
  for (int k = 0; k < 120; ++k) {
    sim.step();
    EXPECT_TRUE((sim.damage().array() >= d_prev.array()).all());
    d_prev = sim.damage();
    const double now = sim.energies().dissipated;
    EXPECT_GE(now, e_d);
    e_d = now;
  }
  EXPECT_GT(e_d, 0);
  EXPECT_LE(max_lipschitz_ratio(sim.lipmesh(), sim.damage(), c.l), 1 + 1e-8);
}

TEST(Simulation, UnstableStepRejectedUnlessAllowed) {
  auto c = tension_config(scratch("unstable"), 1e-6, 1);
  c.cfl_factor = 0.8;
  EXPECT_THROW(Simulation(c, notched_tension_half_mesh(5e-3)), ConfigError);
  c.stability_check = false;
  EXPECT_NO_THROW(Simulation(c, notched_tension_half_mesh(5e-3)));
}

TEST(Simulation, DivergenceReportsStepAndKeepsOutputs) {
  const auto dir = scratch("diverge");
  auto c = tension_config(dir, 1.0, 1000);
  c.cfl_factor = 0.9;
  c.stability_check = false;
  c.bcs[0].value = -1e3;
  Simulation sim(c, notched_tension_half_mesh(5e-3));
  try {
    sim.run();
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GT(e.step(), 0);
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "series.csv"));
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_FALSE(summary["error"].is_null());
}

TEST(Simulation, RerunsAreByteIdentical) {
  const Mesh mesh = notched_tension_half_mesh(5e-3);
  auto run = [&](const std::string& name) {
    auto c = tension_config(scratch(name), 0, 5);
    c.bcs[0].value = -6e6;
    c.write_vtk = false;
    Simulation probe(c, mesh);
    c.t_end = 60 * probe.time_control().dt;
    Simulation(c, mesh).run();
    return slurp(c.output_dir / "series.csv");
  };
  EXPECT_EQ(run("det_a"), run("det_b"));
}
