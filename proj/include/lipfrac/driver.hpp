#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "lipfrac/config.hpp"
#include "lipfrac/dynamics.hpp"
#include "lipfrac/fem.hpp"
#include "lipfrac/lip_damage.hpp"
#include "lipfrac/lipmesh.hpp"
#include "lipfrac/mesh.hpp"
#include "lipfrac/output.hpp"

namespace lipfrac {

struct RunOptions {
  bool write_files = true;
  /// Keep (t, d) at every output tick in RunSummary::damage_history.
  bool keep_damage_history = false;
  /// Progress lines, one per output tick; null for silence.
  std::ostream* log = nullptr;
};

struct RunSummary {
  long steps = 0;
  double dt = 0.0;
  double wall_time = 0.0;  ///< seconds
  std::optional<double> t_branch;
  std::vector<TimeSeriesRow> series;                       ///< one row per output tick
  std::vector<std::pair<double, double>> region_lengths;   ///< (a1, a2) per tick when D1/D2 are set
  std::vector<std::pair<double, Vector>> damage_history;
  int vtk_files = 0;
  double max_lipschitz_ratio = 0.0;  ///< of the final damage field
};

/// One explicit fracture simulation. Each step runs, in order: predictors,
/// displacement update, local damage, bounds, regional damage solves, forces,
/// acceleration and velocity correction.
class Simulation {
 public:
  explicit Simulation(SimulationConfig cfg);
  Simulation(SimulationConfig cfg, Mesh mesh);

  const SimulationConfig& config() const { return cfg_; }
  const Mesh& mesh() const { return mesh_; }
  const MaterialParams& material() const { return params_; }
  const LipMesh& lipmesh() const { return lip_; }
  const TimeControl& time_control() const { return time_; }
  const ExplicitDynamics& dynamics() const { return dyn_; }

  const KinematicState& kinematics() const { return state_; }
  const Vector& damage() const { return d_; }
  const std::vector<StrainSplit>& splits() const { return splits_; }
  const std::vector<double>& tensile_energy() const { return e_plus_; }
  const DamageUpdateStats& last_damage_stats() const { return damage_stats_; }
  long step_count() const { return step_; }
  double time() const { return state_.t; }

  double kinetic_energy() const;
  EnergyIntegrals energies() const;
  double external_work() const { return work_; }
  /// tr(sigma)/2 per element at the current state.
  std::vector<double> hydrostatic_stress() const;

  /// Replaces u and v at t = 0 (prescribed DOFs keep their values) and
  /// recomputes damage and acceleration. Only valid before the first step.
  void set_initial_state(const Vector& u, const Vector& v);

  /// Advances one time step. Throws DivergenceError on non-finite or
  /// runaway displacements and SolverError from the damage solve.
  void step();

  /// Runs until t > t_end, writing outputs every `output_every` steps
  /// (step 0 included). On failure the partial outputs stay on disk.
  RunSummary run(const RunOptions& options = {});

 private:
  void refresh();
  double external_power() const;
  void check_finite(const Vector& x, const char* what) const;

  SimulationConfig cfg_;
  Mesh mesh_;
  MaterialParams params_;
  LipMesh lip_;
  TimeControl time_;
  ExplicitDynamics dyn_;
  std::vector<ShapeGradients> grads_;
  std::vector<Point> centroids_;
  double runaway_limit_ = 0.0;

  KinematicState state_;
  Vector d_;
  std::vector<StrainSplit> splits_;
  std::vector<double> e_plus_;
  Vector F_, R_, reactions_;
  DamageUpdateStats damage_stats_;
  double work_ = 0.0;
  double power_ = 0.0;
  long step_ = 0;
};

}  // namespace lipfrac
