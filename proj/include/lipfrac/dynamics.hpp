#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lipfrac/constitutive.hpp"
#include "lipfrac/fem.hpp"
#include "lipfrac/mesh.hpp"

namespace lipfrac {

struct KinematicState {
  Vector u, v, a;  ///< displacement, velocity, acceleration
  Vector u_p, v_p; ///< predictors of the current step
  double t = 0.0;

  static KinematicState zeros(int num_nodes);
};

struct TimeControl {
  double dt = 0.0;
  double cfl_factor = 0.0;
  double dt_critical = 0.0;  ///< h_min / c_d
  long n_steps = 0;          ///< steps taken while t <= t_end
  double t_end = 0.0;
};

/// dt = cfl_factor * h_min / c_d, held for the whole run.
TimeControl critical_timestep(const Mesh& mesh, const MaterialParams& p, double cfl_factor,
                              double t_end = 0.0);

/// Central-difference stability limit 2 / omega_max of the undamaged,
/// unconstrained pencil (K, M) with the consistent mass, omega_max from power
/// iteration (Rayleigh quotient converged to 1e-7 relative).
double stable_timestep_estimate(const Mesh& mesh, const MaterialParams& p);

enum class BcKind { displacement, velocity, traction };

/// Time modulation of a boundary value: constant (step at t=0+) or linear ramp.
struct TimeProfile {
  enum class Shape { constant, ramp };
  Shape shape = Shape::constant;
  double rise_time = 0.0;

  double factor(double t) const;
  double rate(double t) const;      ///< d factor / dt
  double integral(double t) const;  ///< int_0^t factor
};

struct BoundaryCondition {
  BcKind kind = BcKind::displacement;
  int component = 0;  ///< 0 = x, 1 = y
  double value = 0.0; ///< m, m/s or Pa depending on kind
  TimeProfile profile;
  std::string tag;    ///< facet tag selector
  /// Optional node selector {xmin, ymin, xmax, ymax}; kinematic kinds only.
  std::optional<std::array<double, 4>> box;
};

/// u_p = u + dt v + dt^2/2 a, v_p = v + dt/2 a
void predict(KinematicState& state, double dt);
/// v = v_p + dt/2 a
Vector correct_velocity(const Vector& v_p, const Vector& a, double dt);

/// Central-difference integrator with the consistent mass matrix factorized
/// once on the free DOFs of each component.
class ExplicitDynamics {
 public:
  ExplicitDynamics(const Mesh& mesh, const MaterialParams& p, std::vector<BoundaryCondition> bcs,
                   double dt);
  ~ExplicitDynamics();
  ExplicitDynamics(ExplicitDynamics&&) noexcept;
  ExplicitDynamics& operator=(ExplicitDynamics&&) noexcept;

  double dt() const { return dt_; }
  const SparseMatrix& mass() const { return mass_; }
  const std::vector<int>& prescribed_dofs() const { return prescribed_; }
  bool is_prescribed(int dof) const { return prescription_[dof] >= 0; }

  /// Predictor step: u = u_p, t += dt, prescribed DOFs set to their history.
  void predict(KinematicState& state) const;
  /// Overwrites prescribed u, v, a with their values at state.t.
  void apply_bcs(KinematicState& state) const;
  /// Traction load vector at time t.
  Vector external_forces(double t) const;
  /// a = M^-1 (R - F) on free DOFs; prescribed DOFs take the prescribed acceleration.
  void solve_acceleration(KinematicState& state, const Vector& F, const Vector& R) const;
  /// v = v_p + dt/2 a on free DOFs, prescribed velocity elsewhere.
  void correct_velocity(KinematicState& state) const;
  /// Nodal forces needed to enforce the prescriptions (M a + F - R on prescribed DOFs, 0 elsewhere).
  Vector reaction_forces(const KinematicState& state, const Vector& F, const Vector& R) const;

 private:
  struct ComponentSolver;

  const Mesh* mesh_;
  double dt_;
  std::vector<BoundaryCondition> bcs_;
  SparseMatrix mass_;
  std::vector<int> prescription_;  // per DOF: index into bcs_, or -1
  std::vector<int> prescribed_;
  std::vector<std::pair<std::vector<int>, Eigen::Vector2d>> tractions_;  // facets, traction
  std::vector<int> traction_bc_;
  std::vector<std::unique_ptr<ComponentSolver>> solvers_;
};

}  // namespace lipfrac
