#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

namespace lipfrac {

/// Value, first and second derivative of one separable term.
struct ScalarTermValue {
  double f;
  double df;
  double d2f;
};

/// |x_a - x_b| <= bound
struct PairConstraint {
  int a;
  int b;
  double bound;
};

/// min sum_i f_i(x_i)  s.t.  lower_i <= x_i <= upper_i,  |x_a - x_b| <= bound.
///
/// Each f_i must be convex with a strictly positive second derivative on the
/// whole real line (iterates are not kept inside the box).
struct SeparableProblem {
  std::function<ScalarTermValue(int, double)> term;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::vector<PairConstraint> pairs;
};

struct InteriorPointOptions {
  double tol = 1e-8;
  int max_iter = 200;
};

struct InteriorPointResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  /// max of the relative dual residual, relative primal residual and
  /// sqrt(mean complementarity); converged means the first two are below tol
  /// and the complementarity below 1e-4 tol.
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Primal-dual interior point (Mehrotra predictor-corrector, infeasible start).
/// Variables whose box has collapsed are fixed and eliminated first.
/// `start` is an optional initial guess (clamped into the box).
InteriorPointResult solve_separable(const SeparableProblem& problem,
                                    const InteriorPointOptions& options,
                                    const Eigen::VectorXd* start = nullptr);

}  // namespace lipfrac
