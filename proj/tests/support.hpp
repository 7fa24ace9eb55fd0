// Shared helpers and independent oracles for the test suites.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "lipfrac/lipmesh.hpp"
#include "lipfrac/mesh.hpp"
#include "lipfrac/mesh_builders.hpp"

namespace lipfrac::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
inline int uniform_int(Rng& rng, int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }

/// Structured rectangle with interior nodes jittered by up to 0.15 h and at
/// most `max_elements` triangles.
inline Mesh random_mesh(Rng& rng, int max_elements) {
  int nx, ny;
  do {
    nx = uniform_int(rng, 1, 12);
    ny = uniform_int(rng, 1, 12);
  } while (2 * nx * ny > max_elements);
  const double hx = uniform(rng, 0.5, 2.0) / nx, hy = uniform(rng, 0.5, 2.0) / ny;
  Mesh base = rectangle_mesh(hx * nx, hy * ny, nx, ny);
  std::vector<Point> nodes = base.nodes();
  for (auto& p : nodes) {
    const bool interior_x = p.x() > 1e-12 && p.x() < hx * nx - 1e-12;
    const bool interior_y = p.y() > 1e-12 && p.y() < hy * ny - 1e-12;
    if (interior_x) p.x() += uniform(rng, -0.15, 0.15) * hx;
    if (interior_y) p.y() += uniform(rng, -0.15, 0.15) * hy;
  }
  return Mesh(nodes, base.triangles(), base.facets());
}

/// All-pairs shortest path lengths along lip edges (Floyd-Warshall).
inline std::vector<std::vector<double>> floyd_warshall(const LipMesh& lip) {
  const int n = lip.num_vertices();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> D(n, std::vector<double>(n, inf));
  for (int i = 0; i < n; ++i) D[i][i] = 0;
  for (const auto& e : lip.edges()) {
    D[e.a][e.b] = std::min(D[e.a][e.b], e.length);
    D[e.b][e.a] = std::min(D[e.b][e.a], e.length);
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) D[i][j] = std::min(D[i][j], D[i][k] + D[k][j]);
  return D;
}

/// Random damage field that is 1/l-Lipschitz in the graph metric: the lower
/// envelope of cones min_y (r_y + dist(x,y)/l), capped at 1.
inline Eigen::VectorXd lipschitz_field(Rng& rng, const std::vector<std::vector<double>>& dist, double l,
                                       double max_value) {
  const int n = static_cast<int>(dist.size());
  std::vector<double> r(n);
  for (auto& x : r) x = uniform(rng, 0.0, 1.0) < 0.3 ? uniform(rng, 0.0, max_value) : max_value;
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) {
    double v = 1.0;
    for (int j = 0; j < n; ++j) v = std::min(v, r[j] + dist[i][j] / l);
    d[i] = v;
  }
  return d;
}

/// Hildreth dual coordinate ascent for
///   min 1/2 x'Hx + c'x  s.t.  G x <= h
/// with H diagonal positive. Rows of G are given sparsely as (index, coef) lists.
struct SparseRow {
  std::vector<std::pair<int, double>> terms;
  double rhs;
};

inline Eigen::VectorXd hildreth(const Eigen::VectorXd& H, const Eigen::VectorXd& c,
                                const std::vector<SparseRow>& rows, int sweeps = 200000, double tol = 1e-14) {
  const int n = static_cast<int>(H.size());
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = -c[i] / H[i];
  std::vector<double> lam(rows.size(), 0.0), denom(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    double s = 0;
    for (auto [i, a] : rows[k].terms) s += a * a / H[i];
    denom[k] = s;
  }
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double change = 0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      double gx = 0;
      for (auto [i, a] : rows[k].terms) gx += a * x[i];
      const double next = std::max(0.0, lam[k] + (gx - rows[k].rhs) / denom[k]);
      const double dl = next - lam[k];
      if (dl == 0) continue;
      lam[k] = next;
      for (auto [i, a] : rows[k].terms) x[i] -= dl * a / H[i];
      change = std::max(change, std::abs(dl) * std::sqrt(denom[k]));
    }
    if (change < tol) break;
  }
  return x;
}

/// Sequential QP with Hildreth subproblems for a separable strictly convex
/// objective sum_i f_i(x_i) under box and pair-difference constraints.
struct OracleProblem {
  std::function<std::array<double, 3>(int, double)> term;  // f, f', f''
  Eigen::VectorXd lower, upper;
  std::vector<std::array<double, 3>> pairs;                // a, b, bound
};

inline Eigen::VectorXd sqp_oracle(const OracleProblem& p, int iterations = 60) {
  const int n = static_cast<int>(p.lower.size());
  Eigen::VectorXd x = 0.5 * (p.lower + p.upper);
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd H(n), c(n);
    for (int i = 0; i < n; ++i) {
      const auto t = p.term(i, x[i]);
      H[i] = t[2];
      c[i] = t[1] - t[2] * x[i];
    }
    std::vector<SparseRow> rows;
    for (int i = 0; i < n; ++i) {
      rows.push_back({{{i, 1.0}}, p.upper[i]});
      rows.push_back({{{i, -1.0}}, -p.lower[i]});
    }
    for (const auto& [a, b, bound] : p.pairs) {
      rows.push_back({{{int(a), 1.0}, {int(b), -1.0}}, bound});
      rows.push_back({{{int(a), -1.0}, {int(b), 1.0}}, bound});
    }
    const Eigen::VectorXd next = hildreth(H, c, rows);
    const double step = (next - x).lpNorm<Eigen::Infinity>();
    x = next;
    if (step < 1e-13) break;
  }
  return x;
}

}  // namespace lipfrac::testing
