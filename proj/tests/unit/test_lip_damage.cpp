#include <gtest/gtest.h>

#include <cmath>

#include "../support.hpp"
#include "lipfrac/error.hpp"
#include "lipfrac/lip_damage.hpp"

using namespace lipfrac;
using namespace lipfrac::testing;

namespace {

double objective(double e, double yc, double d) { return detail::g(d) * e + yc * detail::h(d); }

double grid_argmin(double e, double d_n, double yc, int points) {
  double best = d_n, fbest = objective(e, yc, d_n);
  for (int k = 1; k < points; ++k) {
    const double d = d_n + (1.0 - d_n) * k / (points - 1);
    const double f = objective(e, yc, d);
    if (f < fbest) {
      fbest = f;
      best = d;
    }
  }
  return best;
}

MaterialParams material(double l) { return MaterialParams::create(32e9, 0.2, 2450, 600, l); }

struct Instance {
  Mesh mesh;
  LipMesh lip;
  std::vector<std::vector<double>> dist;
  std::vector<double> e_plus;
  Vector d_n;
  double l;
};

Instance random_instance(Rng& rng, int max_elements, double yc) {
  Mesh m = random_mesh(rng, max_elements);
  LipMesh lip = build_lipmesh(m);
  auto dist = floyd_warshall(lip);
  double mean_edge = 0;
  for (const auto& e : lip.edges()) mean_edge += e.length;
  mean_edge /= std::max(1, lip.num_edges());
  const double l = mean_edge * uniform(rng, 1.0, 5.0);
  Vector d_n = uniform(rng, 0, 1) < 0.3 ? Vector::Zero(lip.num_vertices()) : lipschitz_field(rng, dist, l, 0.8);
  std::vector<double> e_plus(lip.num_vertices());
  for (auto& e : e_plus) e = uniform(rng, 0, 1) < 0.5 ? uniform(rng, 0, yc) : uniform(rng, yc, 50 * yc);
  return {std::move(m), std::move(lip), std::move(dist), std::move(e_plus), std::move(d_n), l};
}

}  // namespace

TEST(LocalDamage, BelowThresholdStaysUndamaged) {
  EXPECT_EQ(local_damage_solve(0, 0, 600), 0.0);
  EXPECT_EQ(local_damage_solve(600, 0, 600), 0.0);
  EXPECT_EQ(local_damage_solve(599.9, 0, 600), 0.0);
  EXPECT_GT(local_damage_solve(600.1, 0, 600), 0.0);
  EXPECT_EQ(local_damage_solve(0, 0.4, 600), 0.4);
}

TEST(LocalDamage, InteriorStationarity) {
  const double e = 5000, yc = 600;
  const double d = local_damage_solve(e, 0, yc);
  ASSERT_GT(d, 0);
  ASSERT_LT(d, 1);
  EXPECT_NEAR(detail::dg(d) * e + yc * detail::dh(d), 0, 1e-8 * e);
}

TEST(LocalDamage, MatchesGridScan) {
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    const double yc = uniform(rng, 1, 1e4);
    const double e = yc * std::exp(uniform(rng, -2, 5));
    const double d_n = uniform(rng, 0, 1) < 0.3 ? 0.0 : uniform(rng, 0, 1);
    EXPECT_NEAR(local_damage_solve(e, d_n, yc), grid_argmin(e, d_n, yc, 100001), 2e-5);
  }
}

TEST(LocalDamage, RejectsInvalidInput) {
  EXPECT_THROW(local_damage_solve(-1, 0, 600), ArgumentError);
  EXPECT_THROW(local_damage_solve(1, 1.2, 600), ArgumentError);
}

TEST(Bounds, MatchBruteForceAndOrdering) {
  Rng rng(32);
  for (int trial = 0; trial < 60; ++trial) {
    auto inst = random_instance(rng, 50, 600);
    const auto p = material(inst.l);
    const int n = inst.lip.num_vertices();
    Vector d_loc(n);
    for (int i = 0; i < n; ++i) d_loc[i] = local_damage_solve(inst.e_plus[i], inst.d_n[i], p.Yc);
    const auto b = compute_bounds(inst.lip, d_loc, inst.l);
    for (int x = 0; x < n; ++x) {
      double up = -1e300, lo = 1e300;
      for (int y = 0; y < n; ++y) {
        if (std::isinf(inst.dist[x][y])) continue;
        up = std::max(up, d_loc[y] - inst.dist[x][y] / inst.l);
        lo = std::min(lo, d_loc[y] + inst.dist[x][y] / inst.l);
      }
      EXPECT_NEAR(b.upper[x], up, 1e-10);
      EXPECT_NEAR(b.lower[x], lo, 1e-10);
      EXPECT_LE(inst.d_n[x], b.lower[x] + 1e-12);
      EXPECT_LE(b.lower[x], d_loc[x]);
      EXPECT_LE(d_loc[x], b.upper[x]);
      EXPECT_LE(b.upper[x], 1.0);
    }
  }
}

TEST(Regions, ComponentsOfTheGapSet) {
  // Path of four elements: gap on 0,1 and on 3 only.
  const LipMesh lip({{0, 0}, {1, 0}, {2, 0}, {3, 0}}, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}});
  DamageBounds b{Vector::Zero(4), Vector::Zero(4)};
  b.upper << 0.5, 0.5, 0.0, 0.5;
  const auto regions = extract_regions(lip, b, 1e-9);
  ASSERT_EQ(regions.size(), 2u);
  EXPECT_EQ(regions[0].elements, (std::vector<int>{0, 1}));
  EXPECT_EQ(regions[0].edges, (std::vector<int>{0}));
  ASSERT_EQ(regions[0].frozen.size(), 1u);
  EXPECT_EQ(regions[0].frozen[0].outside, 2);
  EXPECT_EQ(regions[1].elements, (std::vector<int>{3}));
  EXPECT_EQ(regions[1].frozen.size(), 1u);
}

TEST(ConstrainedSolve, TwoElementAnalyticCase) {
  // Strong drive on element 0 only: it reaches 1, element 1 follows at 1 - L/l.
  const double l = 1.0, L = 0.4;
  const LipMesh lip({{0, 0}, {L, 0}}, {{0, 1, L}});
  const auto p = MaterialParams::create(32e9, 0.2, 2450, 1.0, l);
  const std::vector<double> e_plus{1e6, 0.0}, areas{1, 1};
  const Vector d_n = Vector::Zero(2);
  const auto st = damage_update(lip, e_plus, areas, d_n, p, {});
  EXPECT_NEAR(st.d[0], 1.0, 1e-7);
  EXPECT_NEAR(st.d[1], 1.0 - L / l, 1e-7);
}

TEST(ConstrainedSolve, WholeDomainMatchesSqpOracle) {
  Rng rng(33);
  for (int trial = 0; trial < 15; ++trial) {
    auto inst = random_instance(rng, 40, 600);
    const auto p = material(inst.l);
    const int n = inst.lip.num_vertices();
    const Vector d = solve_damage_whole_domain(inst.lip, inst.e_plus, inst.mesh.areas(), inst.d_n, p, {});

    OracleProblem o;
    o.lower = inst.d_n;
    o.upper = Vector::Ones(n);
    const auto& A = inst.mesh.areas();
    o.term = [&](int i, double x) -> std::array<double, 3> {
      const double xc = std::clamp(x, 0.0, 1.0), dx = x - xc;
      const double w = A[i] / p.Yc;
      const double f0 = A[i] * (detail::g(xc) * inst.e_plus[i] + p.Yc * detail::h(xc)) / p.Yc;
      const double f1 = w * (detail::dg(xc) * inst.e_plus[i] + p.Yc * detail::dh(xc));
      const double f2 = w * (detail::d2g(xc) * inst.e_plus[i] + p.Yc * detail::d2h(xc));
      return {f0 + f1 * dx + 0.5 * f2 * dx * dx, f1 + f2 * dx, f2};
    };
    for (const auto& e : inst.lip.edges()) o.pairs.push_back({double(e.a), double(e.b), e.length / inst.l});
    const Vector ref = sqp_oracle(o);
    EXPECT_LT((d - ref).lpNorm<Eigen::Infinity>(), 1e-6) << "trial " << trial;
  }
}

TEST(DamageUpdate, EqualsWholeDomainSolve) {
  Rng rng(34);
  for (int trial = 0; trial < 40; ++trial) {
    auto inst = random_instance(rng, 120, 600);
    const auto p = material(inst.l);
    DamageUpdateStats stats;
    const auto st = damage_update(inst.lip, inst.e_plus, inst.mesh.areas(), inst.d_n, p, {}, &stats);
    const Vector ref = solve_damage_whole_domain(inst.lip, inst.e_plus, inst.mesh.areas(), inst.d_n, p, {});
    EXPECT_LT((st.d - ref).lpNorm<Eigen::Infinity>(), 1e-5) << "trial " << trial;
    const double f = damage_objective(inst.e_plus, inst.mesh.areas(), st.d, p.Yc);
    const double fr = damage_objective(inst.e_plus, inst.mesh.areas(), ref, p.Yc);
    EXPECT_LE(std::abs(f - fr), 1e-6 * std::max(1.0, std::abs(fr)));
    EXPECT_LE(max_lipschitz_ratio(inst.lip, st.d, inst.l), 1 + 1e-8);
    for (int i = 0; i < inst.lip.num_vertices(); ++i) {
      EXPECT_GE(st.d[i], inst.d_n[i]);
      EXPECT_LE(st.d[i], 1.0);
      EXPECT_GE(st.d[i], st.d_lower[i] - 1e-12);
      EXPECT_LE(st.d[i], st.d_upper[i] + 1e-12);
    }
  }
}

TEST(DamageUpdate, QuiescentFieldIsUnchanged) {
  const Mesh m = rectangle_mesh(1, 1, 3, 3);
  const LipMesh lip = build_lipmesh(m);
  const std::vector<double> e_plus(m.num_elements(), 10.0);
  DamageUpdateStats stats;
  const auto st = damage_update(lip, e_plus, m.areas(), Vector::Zero(m.num_elements()), material(0.5), {}, &stats);
  EXPECT_EQ(st.d.lpNorm<Eigen::Infinity>(), 0.0);
  EXPECT_EQ(stats.regions, 0);
}

TEST(LipschitzRatio, Definition) {
  const LipMesh lip({{0, 0}, {2, 0}}, {{0, 1, 2.0}});
  Vector d(2);
  d << 0.1, 0.6;
  EXPECT_DOUBLE_EQ(max_lipschitz_ratio(lip, d, 2.0), 0.5);
}
