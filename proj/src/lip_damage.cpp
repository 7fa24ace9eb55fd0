#include "lipfrac/lip_damage.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>
#include <sstream>

#include "lipfrac/error.hpp"

namespace lipfrac {

DamageState DamageState::zeros(int n) {
  DamageState s;
  s.d = s.d_n = s.d_loc = s.d_upper = s.d_lower = Vector::Zero(n);
  return s;
}

double local_damage_solve(double e_plus, double d_n, double Yc, double tol) {
  if (!(e_plus >= 0)) throw ArgumentError("local_damage_solve: negative tensile energy");
  if (!(d_n >= 0 && d_n <= 1)) throw ArgumentError("local_damage_solve: d_n outside [0,1]");
  if (!(Yc > 0)) throw ArgumentError("local_damage_solve: Yc must be positive");

  auto slope = [&](double d) { return detail::dg(d) * e_plus + Yc * detail::dh(d); };
  if (slope(d_n) >= 0) return d_n;
  if (slope(1.0) <= 0) return 1.0;

  double lo = d_n, hi = 1.0;  // slope(lo) < 0 < slope(hi)
  double d = 0.5 * (lo + hi);
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double fp = slope(d);
    if (fp == 0) return d;
    (fp < 0 ? lo : hi) = d;
    const double curvature = detail::d2g(d) * e_plus + Yc * detail::d2h(d);
    double next = d - fp / curvature;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - d) <= 0.25 * tol) return next;
    d = next;
  }
  return 0.5 * (lo + hi);
}

DamageBounds compute_bounds(const LipMesh& lip, const Vector& d_loc, double l) {
  const int n = lip.num_vertices();
  if (d_loc.size() != n) throw ArgumentError("compute_bounds: size mismatch");
  if (!(l > 0)) throw ArgumentError("compute_bounds: l must be positive");

  DamageBounds b{d_loc, d_loc};
  using Item = std::pair<double, int>;
  {
    std::priority_queue<Item> heap;  // largest first
    for (int v = 0; v < n; ++v) heap.push({b.upper[v], v});
    while (!heap.empty()) {
      auto [val, v] = heap.top();
      heap.pop();
      if (val < b.upper[v]) continue;
      for (const auto& nb : lip.neighbors(v)) {
        const double cand = val - lip.edge(nb.edge).length / l;
        if (cand > b.upper[nb.vertex]) {
          b.upper[nb.vertex] = cand;
          heap.push({cand, nb.vertex});
        }
      }
    }
  }
  {
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;  // smallest first
    for (int v = 0; v < n; ++v) heap.push({b.lower[v], v});
    while (!heap.empty()) {
      auto [val, v] = heap.top();
      heap.pop();
      if (val > b.lower[v]) continue;
      for (const auto& nb : lip.neighbors(v)) {
        const double cand = val + lip.edge(nb.edge).length / l;
        if (cand < b.lower[nb.vertex]) {
          b.lower[nb.vertex] = cand;
          heap.push({cand, nb.vertex});
        }
      }
    }
  }
  return b;
}

std::vector<LipRegion> extract_regions(const LipMesh& lip, const DamageBounds& bounds,
                                       double gap_tol) {
  const int n = lip.num_vertices();
  std::vector<char> gap(n);
  for (int v = 0; v < n; ++v) gap[v] = bounds.upper[v] - bounds.lower[v] > gap_tol;

  std::vector<int> label(n, -1);
  std::vector<LipRegion> regions;
  std::vector<int> queue;
  for (int seed = 0; seed < n; ++seed) {
    if (!gap[seed] || label[seed] >= 0) continue;
    const int id = static_cast<int>(regions.size());
    LipRegion region;
    queue.assign(1, seed);
    label[seed] = id;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const int v = queue[q];
      region.elements.push_back(v);
      for (const auto& nb : lip.neighbors(v)) {
        if (gap[nb.vertex] && label[nb.vertex] < 0) {
          label[nb.vertex] = id;
          queue.push_back(nb.vertex);
        }
      }
    }
    std::sort(region.elements.begin(), region.elements.end());
    regions.push_back(std::move(region));
  }

  // Edges: internal ones, and links to frozen neighbours.
  std::vector<int> local(n, -1);
  for (auto& region : regions) {
    for (int k = 0; k < static_cast<int>(region.elements.size()); ++k) local[region.elements[k]] = k;
  }
  for (int k = 0; k < lip.num_edges(); ++k) {
    const auto& e = lip.edge(k);
    const int la = label[e.a], lb = label[e.b];
    if (la >= 0 && la == lb) {
      regions[la].edges.push_back(k);
    } else {
      if (la >= 0) regions[la].frozen.push_back({local[e.a], e.b, e.length});
      if (lb >= 0) regions[lb].frozen.push_back({local[e.b], e.a, e.length});
    }
  }
  return regions;
}

namespace {

// Scaled per-element damage objective (A/A_ref) [g(d) e/Yc + h(d)], continued
// by its second-order Taylor expansion outside [0,1] so that interior-point
// iterates off the box still see a convex model.
struct DamageTerm {
  std::vector<double> weight;
  std::vector<double> drive;

  ScalarTermValue operator()(int i, double x) const {
    const double xc = std::clamp(x, 0.0, 1.0);
    const double w = weight[i], q = drive[i];
    const double f0 = w * (detail::g(xc) * q + detail::h(xc));
    const double f1 = w * (detail::dg(xc) * q + detail::dh(xc));
    const double f2 = w * (detail::d2g(xc) * q + detail::d2h(xc));
    const double dx = x - xc;
    return {f0 + f1 * dx + 0.5 * f2 * dx * dx, f1 + f2 * dx, f2};
  }
};

}  // namespace

Vector constrained_damage_solve(const LipMesh& lip, const LipRegion& region, int region_id,
                                std::span<const double> e_plus, std::span<const double> areas,
                                const Vector& d_n, const Vector& d_frozen,
                                const DamageBounds& bounds, const MaterialParams& p,
                                const DamageSolverOptions& options) {
  const int m = static_cast<int>(region.elements.size());
  if (m == 0) throw ArgumentError("constrained_damage_solve: empty region");

  std::vector<int> local(lip.num_vertices(), -1);
  double area_ref = 0;
  for (int k = 0; k < m; ++k) {
    local[region.elements[k]] = k;
    area_ref += areas[region.elements[k]];
  }
  area_ref /= m;

  DamageTerm term;
  term.weight.resize(m);
  term.drive.resize(m);
  SeparableProblem problem;
  problem.lower.resize(m);
  problem.upper.resize(m);
  Vector start(m);
  for (int k = 0; k < m; ++k) {
    const int e = region.elements[k];
    if (!std::isfinite(e_plus[e]) || e_plus[e] < 0) {
      throw ArgumentError("constrained_damage_solve: invalid tensile energy at element " + std::to_string(e));
    }
    term.weight[k] = areas[e] / area_ref;
    term.drive[k] = e_plus[e] / p.Yc;
    problem.lower[k] = std::max(d_n[e], bounds.lower[e]);
    problem.upper[k] = std::min(1.0, bounds.upper[e]);
    start[k] = d_frozen[e];
  }
  for (const auto& link : region.frozen) {
    const double v = d_frozen[link.outside], c = link.length / p.l;
    problem.lower[link.local] = std::max(problem.lower[link.local], v - c);
    problem.upper[link.local] = std::min(problem.upper[link.local], v + c);
  }
  for (int k : region.edges) {
    const auto& e = lip.edge(k);
    problem.pairs.push_back({local[e.a], local[e.b], e.length / p.l});
  }
  problem.term = std::cref(term);

  InteriorPointOptions ipo{options.kkt_tol, options.max_iter};
  auto result = solve_separable(problem, ipo, &start);
  if (!result.converged) {
    std::ostringstream msg;
    msg << "damage region " << region_id << " (" << m << " elements): constrained solve did not converge, "
        << "KKT residual " << result.residual << " after " << result.iterations << " iterations";
    throw SolverError(msg.str());
  }
  Vector out(m);
  for (int k = 0; k < m; ++k) {
    out[k] = std::clamp(result.x[k], problem.lower[k], std::max(problem.lower[k], problem.upper[k]));
  }
  return out;
}

DamageState damage_update(const LipMesh& lip, std::span<const double> e_plus,
                          std::span<const double> areas, const Vector& d_previous,
                          const MaterialParams& p, const DamageSolverOptions& options,
                          DamageUpdateStats* stats) {
  const int n = lip.num_vertices();
  if (static_cast<int>(e_plus.size()) != n || static_cast<int>(areas.size()) != n || d_previous.size() != n) {
    throw ArgumentError("damage_update: size mismatch");
  }
  DamageState s;
  s.d_n = d_previous;
  s.d_loc.resize(n);
  for (int e = 0; e < n; ++e) s.d_loc[e] = local_damage_solve(e_plus[e], d_previous[e], p.Yc, options.local_tol);

  auto b = compute_bounds(lip, s.d_loc, p.l);
  s.d = s.d_loc;
  const auto regions = extract_regions(lip, b, options.gap_tol);
  DamageUpdateStats local_stats;
  for (int r = 0; r < static_cast<int>(regions.size()); ++r) {
    const auto& region = regions[r];
    // Outside values are d_loc; regions never touch each other, so solving in
    // sequence on s.d is equivalent to solving them independently.
    const Vector x = constrained_damage_solve(lip, region, r, e_plus, areas, s.d_n, s.d_loc, b, p, options);
    for (int k = 0; k < static_cast<int>(region.elements.size()); ++k) s.d[region.elements[k]] = x[k];
    local_stats.region_elements += static_cast<int>(region.elements.size());
  }
  local_stats.regions = static_cast<int>(regions.size());
  if (stats) *stats = local_stats;
  s.d_upper = std::move(b.upper);
  s.d_lower = std::move(b.lower);
  return s;
}

Vector solve_damage_whole_domain(const LipMesh& lip, std::span<const double> e_plus,
                                 std::span<const double> areas, const Vector& d_n,
                                 const MaterialParams& p, const DamageSolverOptions& options) {
  const int n = lip.num_vertices();
  const double area_ref = std::accumulate(areas.begin(), areas.end(), 0.0) / n;
  DamageTerm term;
  term.weight.resize(n);
  term.drive.resize(n);
  SeparableProblem problem;
  problem.lower = d_n;
  problem.upper = Vector::Ones(n);
  Vector start(n);
  for (int e = 0; e < n; ++e) {
    term.weight[e] = areas[e] / area_ref;
    term.drive[e] = e_plus[e] / p.Yc;
    start[e] = local_damage_solve(e_plus[e], d_n[e], p.Yc, options.local_tol);
  }
  for (const auto& e : lip.edges()) problem.pairs.push_back({e.a, e.b, e.length / p.l});
  problem.term = std::cref(term);
  auto result = solve_separable(problem, {options.kkt_tol, options.max_iter}, &start);
  if (!result.converged) {
    throw SolverError("whole-domain damage solve did not converge, KKT residual " +
                      std::to_string(result.residual));
  }
  return result.x.cwiseMax(d_n).cwiseMin(1.0);
}

double damage_objective(std::span<const double> e_plus, std::span<const double> areas,
                        const Vector& d, double Yc) {
  double f = 0;
  for (int e = 0; e < d.size(); ++e) f += areas[e] * (detail::g(d[e]) * e_plus[e] + Yc * detail::h(d[e]));
  return f;
}

double max_lipschitz_ratio(const LipMesh& lip, const Vector& d, double l) {
  double r = 0;
  for (const auto& e : lip.edges()) r = std::max(r, std::abs(d[e.a] - d[e.b]) * l / e.length);
  return r;
}

std::vector<double> tensile_energies(std::span<const StrainSplit> splits) {
  std::vector<double> out(splits.size());
  for (std::size_t e = 0; e < splits.size(); ++e) out[e] = splits[e].e_plus;
  return out;
}

}  // namespace lipfrac
