#include "lipfrac/convex_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "lipfrac/error.hpp"

namespace lipfrac {

namespace {

// One inequality row: x[plus] - x[minus] <= rhs. Either index may be -1.
struct Row {
  int plus;
  int minus;
  double rhs;
};

constexpr double kCollapse = 1e-13;

// Fixes variables whose box collapsed and folds their pair constraints into
// the neighbours' boxes. Returns false if the constraints are inconsistent.
bool eliminate_fixed(const SeparableProblem& p, Eigen::VectorXd& lo, Eigen::VectorXd& hi,
                     std::vector<char>& fixed, double tol) {
  const int n = static_cast<int>(lo.size());
  fixed.assign(n, 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      if (fixed[i]) continue;
      if (lo[i] > hi[i] + tol) return false;
      if (hi[i] - lo[i] <= kCollapse) {
        fixed[i] = 1;
        hi[i] = lo[i] = std::min(lo[i], hi[i]) + 0.5 * std::abs(hi[i] - lo[i]);
        changed = true;
      }
    }
    for (const auto& c : p.pairs) {
      const bool fa = fixed[c.a], fb = fixed[c.b];
      if (fa && fb) {
        if (std::abs(lo[c.a] - lo[c.b]) > c.bound + tol) return false;
      } else if (fa || fb) {
        const int f = fa ? c.a : c.b, v = fa ? c.b : c.a;
        const double nlo = std::max(lo[v], lo[f] - c.bound);
        const double nhi = std::min(hi[v], lo[f] + c.bound);
        if (nlo != lo[v] || nhi != hi[v]) {
          lo[v] = nlo;
          hi[v] = nhi;
          changed = true;
        }
      }
    }
  }
  return true;
}

double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double alpha = 1.0;
  for (int i = 0; i < v.size(); ++i)
    if (dv[i] < 0) alpha = std::min(alpha, -v[i] / dv[i]);
  return alpha;
}

}  // namespace

InteriorPointResult solve_separable(const SeparableProblem& problem,
                                    const InteriorPointOptions& options,
                                    const Eigen::VectorXd* start) {
  const int n_all = static_cast<int>(problem.lower.size());
  if (problem.upper.size() != n_all) throw ArgumentError("solve_separable: bound size mismatch");
  for (const auto& c : problem.pairs) {
    if (c.a < 0 || c.a >= n_all || c.b < 0 || c.b >= n_all || c.a == c.b || !(c.bound >= 0)) {
      throw ArgumentError("solve_separable: invalid pair constraint");
    }
  }

  InteriorPointResult result;
  Eigen::VectorXd lo = problem.lower, hi = problem.upper;
  std::vector<char> fixed;
  if (!eliminate_fixed(problem, lo, hi, fixed, options.tol)) {
    result.x = lo.cwiseMax(problem.lower).cwiseMin(problem.upper);
    result.residual = std::numeric_limits<double>::infinity();
    return result;
  }

  // Free variable numbering.
  std::vector<int> local(n_all, -1);
  std::vector<int> global;
  for (int i = 0; i < n_all; ++i)
    if (!fixed[i]) {
      local[i] = static_cast<int>(global.size());
      global.push_back(i);
    }
  const int n = static_cast<int>(global.size());

  Eigen::VectorXd x_all(n_all);
  for (int i = 0; i < n_all; ++i) {
    double guess = start ? (*start)[i] : 0.5 * (lo[i] + hi[i]);
    x_all[i] = std::clamp(guess, lo[i], hi[i]);
  }

  std::vector<Row> rows;
  for (int k = 0; k < n; ++k) {
    const int i = global[k];
    if (std::isfinite(hi[i])) rows.push_back({k, -1, hi[i]});
    if (std::isfinite(lo[i])) rows.push_back({-1, k, -lo[i]});
  }
  for (const auto& c : problem.pairs) {
    if (fixed[c.a] || fixed[c.b]) continue;
    rows.push_back({local[c.a], local[c.b], c.bound});
    rows.push_back({local[c.b], local[c.a], c.bound});
  }
  const int m = static_cast<int>(rows.size());

  auto evaluate_objective = [&](const Eigen::VectorXd& xa) {
    double f = 0;
    for (int i = 0; i < n_all; ++i) f += problem.term(i, xa[i]).f;
    return f;
  };

  if (n == 0 || m == 0) {
    // Nothing left to optimize (all fixed), or unconstrained: Newton per variable.
    for (int k = 0; k < n; ++k) {
      double x = x_all[global[k]];
      for (int it = 0; it < 100; ++it) {
        const auto t = problem.term(global[k], x);
        const double dx = -t.df / t.d2f;
        x += dx;
        if (std::abs(dx) < 1e-15) break;
      }
      x_all[global[k]] = x;
    }
    result.x = x_all;
    result.objective = evaluate_objective(x_all);
    result.converged = true;
    return result;
  }

  Eigen::VectorXd x(n);
  for (int k = 0; k < n; ++k) x[k] = x_all[global[k]];

  auto apply_G = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
    out.resize(m);
    for (int r = 0; r < m; ++r) {
      double s = 0;
      if (rows[r].plus >= 0) s += v[rows[r].plus];
      if (rows[r].minus >= 0) s -= v[rows[r].minus];
      out[r] = s;
    }
  };
  auto apply_Gt = [&](const Eigen::VectorXd& w, Eigen::VectorXd& out) {
    out.setZero(n);
    for (int r = 0; r < m; ++r) {
      if (rows[r].plus >= 0) out[rows[r].plus] += w[r];
      if (rows[r].minus >= 0) out[rows[r].minus] -= w[r];
    }
  };

  Eigen::VectorXd h(m);
  for (int r = 0; r < m; ++r) h[r] = rows[r].rhs;

  Eigen::VectorXd Gx, s(m), z(m);
  apply_G(x, Gx);
  for (int r = 0; r < m; ++r) {
    s[r] = std::max(h[r] - Gx[r], 0.1);
    z[r] = 1.0;
  }

  // Newton steps solve the augmented system
  //   [ H   G^T ] [dx]   [ -rd            ]
  //   [ G   -D  ] [dz] = [ -rp + Z^-1 rc  ],   D = S Z^-1 + delta,
  // which is quasi-definite (H > 0, D > 0), so LDL^T exists for any ordering.
  // Unlike the reduced form H + G^T D^-1 G it stays bounded as active slacks
  // go to zero. delta is a static regularization of dependent active rows.
  constexpr double kDualReg = 1e-13;
  const int N = n + m;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(n + 3 * m);
  Eigen::SparseMatrix<double> K(N, N);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool analyzed = false;

  Eigen::VectorXd grad(n), hess(n), rd(n), rp(m), Gtz, ds(m), dz(m), dx(n), rhs(N), sol(N);
  auto eval_terms = [&] {
    for (int k = 0; k < n; ++k) {
      const auto t = problem.term(global[k], x[k]);
      grad[k] = t.df;
      hess[k] = t.d2f;
    }
  };

  // Direction for complementarity residual rc (S Z e - target).
  auto newton_direction = [&](const Eigen::VectorXd& rc) {
    rhs.head(n) = -rd;
    for (int r = 0; r < m; ++r) rhs[n + r] = -rp[r] + rc[r] / z[r];
    sol = ldlt.solve(rhs);
    dx = sol.head(n);
    dz = sol.tail(m);
    for (int r = 0; r < m; ++r) ds[r] = -(rc[r] + s[r] * dz[r]) / z[r];
  };

  // Degenerate constraints (active with zero multiplier) are only resolved to
  // about sqrt(mu), so complementarity is driven below 1e-4 tol.
  const double h_scale = 1.0 + h.lpNorm<Eigen::Infinity>();
  const double mu_goal = 1e-4 * options.tol;
  Eigen::VectorXd best_x = x;
  double best_merit = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < options.max_iter; ++iter) {
    eval_terms();
    apply_Gt(z, Gtz);
    rd = grad + Gtz;
    apply_G(x, Gx);
    rp = Gx + s - h;
    const double mu = s.dot(z) / m;
    const double rd_rel = rd.lpNorm<Eigen::Infinity>() / (1.0 + grad.lpNorm<Eigen::Infinity>());
    const double rp_rel = rp.lpNorm<Eigen::Infinity>() / h_scale;
    const double merit = std::max({rd_rel, rp_rel, std::sqrt(mu)});
    if (merit < best_merit) {
      best_merit = merit;
      best_x = x;
      result.residual = merit;
      result.iterations = iter;
    }
    if (rd_rel <= options.tol && rp_rel <= options.tol && mu <= mu_goal) {
      result.converged = true;
      break;
    }

    trip.clear();
    for (int k = 0; k < n; ++k) trip.emplace_back(k, k, hess[k]);
    for (int r = 0; r < m; ++r) {
      if (rows[r].plus >= 0) trip.emplace_back(n + r, rows[r].plus, 1.0);
      if (rows[r].minus >= 0) trip.emplace_back(n + r, rows[r].minus, -1.0);
      trip.emplace_back(n + r, n + r, -(s[r] / z[r] + kDualReg));
    }
    K.setFromTriplets(trip.begin(), trip.end());
    if (!analyzed) {
      ldlt.analyzePattern(K);
      analyzed = true;
    }
    ldlt.factorize(K);
    if (ldlt.info() != Eigen::Success) break;

    // Predictor.
    Eigen::VectorXd rc = s.cwiseProduct(z);
    newton_direction(rc);
    const double a_aff = std::min(max_step(s, ds), max_step(z, dz));
    const double mu_aff = (s + a_aff * ds).dot(z + a_aff * dz) / m;
    const double sigma = std::pow(mu_aff / mu, 3);

    // Corrector.
    rc = rc + ds.cwiseProduct(dz) - Eigen::VectorXd::Constant(m, std::max(sigma * mu, 0.1 * mu_goal));
    newton_direction(rc);
    const double alpha = std::min(1.0, 0.99 * std::min(max_step(s, ds), max_step(z, dz)));
    x += alpha * dx;
    s += alpha * ds;
    z += alpha * dz;
    if (!x.allFinite()) break;
  }
  if (result.converged) best_x = x;
  x = best_x;

  for (int k = 0; k < n; ++k) x_all[global[k]] = x[k];
  result.x = x_all;
  result.objective = evaluate_objective(x_all);
  return result;
}

}  // namespace lipfrac
