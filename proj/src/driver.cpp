#include "lipfrac/driver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "lipfrac/error.hpp"
#include "lipfrac/postproc.hpp"

namespace lipfrac {

namespace {

Mesh load_config_mesh(const SimulationConfig& cfg) {
  return load_mesh(cfg.mesh_path, cfg.mesh_format, cfg.physical_tags);
}

double bounding_diagonal(const Mesh& mesh) {
  Eigen::Vector2d lo = mesh.node(0), hi = mesh.node(0);
  for (const auto& p : mesh.nodes()) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

TimeControl checked_timestep(const SimulationConfig& cfg, const Mesh& mesh, const MaterialParams& p) {
  const TimeControl tc = critical_timestep(mesh, p, cfg.cfl_factor, cfg.t_end);
  if (cfg.stability_check) {
    const double stable = stable_timestep_estimate(mesh, p);
    if (tc.dt > stable) {
      char msg[256];
      std::snprintf(msg, sizeof msg,
                    "dt = %.6g s exceeds the consistent-mass stability estimate %.6g s "
                    "(cfl_factor <= %.3f); lower cfl_factor or set stability_check = false",
                    tc.dt, stable, stable / tc.dt_critical);
      throw ConfigError(msg);
    }
  }
  return tc;
}

std::string snapshot_name(long step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%07ld.vtk", step);
  return buf;
}

}  // namespace

Simulation::Simulation(SimulationConfig cfg) : Simulation(cfg, load_config_mesh(cfg)) {}

Simulation::Simulation(SimulationConfig cfg, Mesh mesh)
    : cfg_(std::move(cfg)),
      mesh_(std::move(mesh)),
      params_(cfg_.material()),
      lip_(build_lipmesh(mesh_)),
      time_(checked_timestep(cfg_, mesh_, params_)),
      dyn_(mesh_, params_, cfg_.bcs, time_.dt),
      grads_(shape_gradients(mesh_)),
      runaway_limit_(bounding_diagonal(mesh_)),
      state_(KinematicState::zeros(mesh_.num_nodes())),
      d_(Vector::Zero(mesh_.num_elements())) {
  centroids_.reserve(mesh_.num_elements());
  for (int e = 0; e < mesh_.num_elements(); ++e) centroids_.push_back(mesh_.centroid(e));
  dyn_.apply_bcs(state_);
  refresh();
  power_ = external_power();
}

void Simulation::check_finite(const Vector& x, const char* what) const {
  if (!x.allFinite()) throw DivergenceError(std::string("non-finite ") + what, step_);
  if (x.lpNorm<Eigen::Infinity>() > runaway_limit_ && std::string(what) == "displacement") {
    throw DivergenceError("displacement exceeds the domain size", step_);
  }
}

void Simulation::refresh() {
  check_finite(state_.u, "displacement");
  const auto strains = strain_from_displacement(mesh_, grads_, state_.u);
  splits_ = split_strains(strains, params_);
  e_plus_ = tensile_energies(splits_);
  DamageState ds = damage_update(lip_, e_plus_, mesh_.areas(), d_, params_, cfg_.solver, &damage_stats_);
  d_ = std::move(ds.d);

  F_ = internal_forces(mesh_, grads_, splits_, d_, params_);
  R_ = dyn_.external_forces(state_.t);
  dyn_.solve_acceleration(state_, F_, R_);
  check_finite(state_.a, "acceleration");
  reactions_ = dyn_.reaction_forces(state_, F_, R_);
}

double Simulation::external_power() const { return (R_ + reactions_).dot(state_.v); }

void Simulation::set_initial_state(const Vector& u, const Vector& v) {
  if (step_ != 0) throw ArgumentError("set_initial_state: simulation already advanced");
  if (u.size() != state_.u.size() || v.size() != state_.v.size()) {
    throw ArgumentError("set_initial_state: size mismatch");
  }
  state_.u = u;
  state_.v = v;
  dyn_.apply_bcs(state_);
  d_.setZero();
  refresh();
  power_ = external_power();
}

void Simulation::step() {
  ++step_;
  dyn_.predict(state_);
  refresh();
  dyn_.correct_velocity(state_);
  check_finite(state_.v, "velocity");
  const double p = external_power();
  work_ += 0.5 * time_.dt * (power_ + p);
  power_ = p;
}

double Simulation::kinetic_energy() const { return lipfrac::kinetic_energy(dyn_.mass(), state_.v); }

EnergyIntegrals Simulation::energies() const { return energy_integrals(mesh_, splits_, d_, params_); }

std::vector<double> Simulation::hydrostatic_stress() const {
  std::vector<double> out(splits_.size());
  for (std::size_t e = 0; e < splits_.size(); ++e) out[e] = 0.5 * stress(splits_[e], d_[e], params_).trace();
  return out;
}

RunSummary Simulation::run(const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const auto& pp = cfg_.postproc;
  const double c_R = wave_speeds(params_).c_R;
  const bool regions = pp.region1 && pp.region2;

  BranchingOptions branching;
  if (pp.notch_tip) branching.notch_tip = *pp.notch_tip;
  branching.direction = pp.crack_direction.normalized();
  branching.d_thresh = pp.d_thresh;
  branching.l = params_.l;
  branching.mirror_offset = pp.mirror_offset;

  RunSummary summary;
  summary.dt = time_.dt;

  std::optional<TimeSeriesWriter> csv;
  std::optional<std::ofstream> region_csv;
  if (options.write_files) {
    std::filesystem::create_directories(cfg_.output_dir);
    csv.emplace(cfg_.output_dir / "series.csv");
    if (regions) {
      region_csv.emplace(cfg_.output_dir / "regions.csv");
      *region_csv << "t,a1,a2\n";
    }
  }

  Vector d_last = d_;
  double a = 0.0;
  double t_last = state_.t;

  auto emit = [&] {
    if (pp.mode == CrackLengthMode::symmetric_branching && !summary.t_branch &&
        is_branched(d_, centroids_, branching)) {
      summary.t_branch = state_.t;
    }
    const double da = crack_length_increment(d_, d_last, mesh_.areas(), params_.l, pp.mode, state_.t,
                                             summary.t_branch);
    a += da;
    const double v_tip = state_.t > t_last ? da / (state_.t - t_last) : 0.0;
    d_last = d_;
    t_last = state_.t;

    const auto en = energies();
    TimeSeriesRow row{state_.t, kinetic_energy(), en.potential, en.dissipated, work_, a, v_tip / c_R};
    summary.series.push_back(row);
    if (regions) {
      summary.region_lengths.push_back(
          crack_length_regions(d_, mesh_.areas(), centroids_, params_.l, *pp.region1, *pp.region2));
    }
    if (options.keep_damage_history) summary.damage_history.emplace_back(state_.t, d_);

    if (options.write_files) {
      csv->write(row);
      if (regions) {
        const auto& [a1, a2] = summary.region_lengths.back();
        *region_csv << format_double(state_.t) << ',' << format_double(a1) << ',' << format_double(a2) << '\n';
        region_csv->flush();
      }
      if (cfg_.write_vtk) {
        const auto hydro = hydrostatic_stress();
        write_vtk_file(cfg_.output_dir / snapshot_name(step_), mesh_,
                       {state_.u, state_.v, d_, e_plus_, hydro});
        ++summary.vtk_files;
      }
    }
    if (options.log) {
      char buf[200];
      std::snprintf(buf, sizeof buf, "step %7ld  t = %.4e  E_kin = %.4e  E_d = %.4e  a = %.4e  regions = %d\n",
                    step_, state_.t, row.E_kin, row.E_d, a, damage_stats_.regions);
      *options.log << buf << std::flush;
    }
  };

  auto finish = [&](const char* error) {
    summary.steps = step_;
    summary.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    summary.max_lipschitz_ratio = max_lipschitz_ratio(lip_, d_, params_.l);
    if (!options.write_files) return;
    const auto ws = wave_speeds(params_);
    nlohmann::json j;
    j["config"] = config_to_json(cfg_);
    j["derived"] = {{"lambda", params_.lambda}, {"mu", params_.mu}, {"Yc", params_.Yc},
                    {"c_d", ws.c_d},          {"c_s", ws.c_s},    {"c_R", ws.c_R},
                    {"dt", time_.dt},         {"n_steps", time_.n_steps}};
    j["wall_time"] = summary.wall_time;
    j["steps"] = summary.steps;
    j["t_br"] = summary.t_branch ? nlohmann::json(*summary.t_branch) : nlohmann::json(nullptr);
    j["vtk_files"] = summary.vtk_files;
    j["max_lipschitz_ratio"] = summary.max_lipschitz_ratio;
    j["error"] = error ? nlohmann::json(error) : nlohmann::json(nullptr);
    write_json_file(cfg_.output_dir / "summary.json", j);
  };

  try {
    if (step_ == 0) emit();
    while (step_ < time_.n_steps) {
      step();
      if (step_ % cfg_.output_every == 0) emit();
    }
  } catch (const std::exception& e) {
    finish(e.what());
    throw;
  }
  finish(nullptr);
  return summary;
}

}  // namespace lipfrac
