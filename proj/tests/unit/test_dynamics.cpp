#include <gtest/gtest.h>

#include <cmath>

#include "../support.hpp"
#include "lipfrac/dynamics.hpp"
#include "lipfrac/error.hpp"

using namespace lipfrac;
using namespace lipfrac::testing;

namespace {

MaterialParams concrete() { return MaterialParams::create(32e9, 0.2, 2450, 600, 1.25e-3); }

BoundaryCondition fix(const std::string& tag, int comp) {
  BoundaryCondition bc;
  bc.kind = BcKind::displacement;
  bc.component = comp;
  bc.tag = tag;
  return bc;
}

// Linear elastic leapfrog driven through ExplicitDynamics (no damage).
struct ElasticRun {
  const Mesh& mesh;
  const MaterialParams& p;
  ExplicitDynamics dyn;
  KinematicState s;
  Vector R;

  ElasticRun(const Mesh& m, const MaterialParams& mp, std::vector<BoundaryCondition> bcs, double dt)
      : mesh(m), p(mp), dyn(m, mp, std::move(bcs), dt), s(KinematicState::zeros(m.num_nodes())) {}

  void init() {
    dyn.apply_bcs(s);
    R = dyn.external_forces(s.t);
    dyn.solve_acceleration(s, forces(), R);
  }
  Vector forces() const { return internal_forces(mesh, s.u, Vector::Zero(mesh.num_elements()), p); }
  void step() {
    dyn.predict(s);
    R = dyn.external_forces(s.t);
    dyn.solve_acceleration(s, forces(), R);
    dyn.correct_velocity(s);
  }
  double energy() const {
    const auto sp = split_strains(strain_from_displacement(mesh, s.u), p);
    return kinetic_energy(dyn.mass(), s.v) + energy_integrals(mesh, sp, Vector::Zero(mesh.num_elements()), p).potential;
  }
};

}  // namespace

TEST(TimeStep, CflFormulaAndStepCount) {
  const Mesh m = rectangle_mesh(0.1, 0.02, 100, 20);
  const auto p = concrete();
  const auto tc = critical_timestep(m, p, 0.5, 1e-5);
  const double c_d = wave_speeds(p).c_d;
  EXPECT_NEAR(tc.dt_critical, 1e-3 / c_d, 1e-18);
  EXPECT_NEAR(tc.dt, 0.5e-3 / c_d, 1e-18);
  EXPECT_EQ(tc.n_steps, static_cast<long>(std::floor(1e-5 / tc.dt)) + 1);
  EXPECT_THROW(critical_timestep(m, p, 1.0), ArgumentError);
  EXPECT_THROW(critical_timestep(m, p, 0.0), ArgumentError);
}

TEST(TimeStep, StabilityEstimateBelowCflOne) {
  const Mesh m = rectangle_mesh(0.02, 0.01, 20, 10);
  const auto p = concrete();
  const double ratio = stable_timestep_estimate(m, p) / critical_timestep(m, p, 0.5).dt_critical;
  EXPECT_GT(ratio, 0.35);
  EXPECT_LT(ratio, 0.5);
}

TEST(TimeProfile, ConstantAndRamp) {
  TimeProfile c;
  EXPECT_EQ(c.factor(0.3), 1.0);
  EXPECT_EQ(c.integral(2.0), 2.0);
  EXPECT_EQ(c.rate(0.1), 0.0);
  TimeProfile r{TimeProfile::Shape::ramp, 2.0};
  EXPECT_DOUBLE_EQ(r.factor(1.0), 0.5);
  EXPECT_DOUBLE_EQ(r.factor(5.0), 1.0);
  EXPECT_DOUBLE_EQ(r.rate(1.0), 0.5);
  EXPECT_DOUBLE_EQ(r.rate(3.0), 0.0);
  EXPECT_DOUBLE_EQ(r.integral(1.0), 0.25);
  EXPECT_DOUBLE_EQ(r.integral(3.0), 2.0);
}

TEST(Newmark, PredictorAndCorrector) {
  KinematicState s = KinematicState::zeros(1);
  s.u << 1, 2;
  s.v << 3, 4;
  s.a << 10, -10;
  predict(s, 0.1);
  EXPECT_DOUBLE_EQ(s.u_p[0], 1 + 0.3 + 0.05);
  EXPECT_DOUBLE_EQ(s.v_p[1], 4 - 0.5);
  const Vector v = correct_velocity(s.v_p, Vector::Constant(2, 2.0), 0.1);
  EXPECT_DOUBLE_EQ(v[0], 3 + 0.5 + 0.1);
}

TEST(Dynamics, MissingTagAndDoublePrescriptionRejected) {
  const Mesh m = rectangle_mesh(1, 1, 2, 2);
  const auto p = concrete();
  EXPECT_THROW(ExplicitDynamics(m, p, {fix("nowhere", 0)}, 1e-7), ConfigError);
  EXPECT_THROW(ExplicitDynamics(m, p, {fix("left", 0), fix("bottom", 0)}, 1e-7), ConfigError);
  EXPECT_NO_THROW(ExplicitDynamics(m, p, {fix("left", 0), fix("bottom", 1)}, 1e-7));
}

TEST(Dynamics, FreeBodyUnderUniformTractionAccelerates) {
  // Uniform traction on a free body: total momentum rate equals total load.
  const Mesh m = rectangle_mesh(0.02, 0.01, 8, 4);
  const auto p = concrete();
  BoundaryCondition t;
  t.kind = BcKind::traction;
  t.component = 0;
  t.value = 1e6;
  t.tag = "right";
  ElasticRun run(m, p, {t}, 1e-8);
  run.init();
  const Vector ones = [&] {
    Vector e = Vector::Zero(2 * m.num_nodes());
    for (int i = 0; i < m.num_nodes(); ++i) e[2 * i] = 1;
    return e;
  }();
  EXPECT_NEAR(ones.dot(run.dyn.mass() * run.s.a), 1e6 * 0.01, 1e-6);
}

TEST(Dynamics, EnergyConservedAtStableStep) {
  const Mesh m = rectangle_mesh(0.02, 0.01, 20, 10);
  const auto p = concrete();
  const double dt = 0.35 * critical_timestep(m, p, 0.5).dt_critical;
  ElasticRun run(m, p, {fix("left", 0), fix("left", 1)}, dt);
  for (int i = 0; i < m.num_nodes(); ++i) {
    const double x = m.node(i).x();
    run.s.u[2 * i + 1] = 1e-6 * std::sin(M_PI * x / 0.04);
  }
  run.init();
  const double e0 = run.energy();
  double worst = 0;
  for (int k = 0; k < 2000; ++k) {
    run.step();
    worst = std::max(worst, std::abs(run.energy() - e0) / e0);
  }
  EXPECT_LT(worst, 0.01);
}

TEST(Dynamics, TimeReversal) {
  // Leapfrog is time reversible: stepping back with -v recovers the start.
  const Mesh m = rectangle_mesh(0.01, 0.01, 6, 6);
  const auto p = concrete();
  const double dt = 0.3 * critical_timestep(m, p, 0.5).dt_critical;
  ElasticRun run(m, p, {}, dt);
  Rng rng(42);
  for (auto& x : run.s.u) x = uniform(rng, -1e-7, 1e-7);
  run.init();
  const Vector u0 = run.s.u;
  for (int k = 0; k < 200; ++k) run.step();
  run.s.v = -run.s.v;
  for (int k = 0; k < 200; ++k) run.step();
  EXPECT_LT((run.s.u - u0).lpNorm<Eigen::Infinity>(), 1e-6 * u0.lpNorm<Eigen::Infinity>());
}

TEST(Dynamics, PrescribedVelocityFollowsProfile) {
  const Mesh m = rectangle_mesh(0.01, 0.01, 4, 4);
  const auto p = concrete();
  BoundaryCondition v;
  v.kind = BcKind::velocity;
  v.component = 0;
  v.value = 2.0;
  v.tag = "left";
  v.profile = {TimeProfile::Shape::ramp, 1e-6};
  const double dt = 1e-8;
  ElasticRun run(m, p, {v}, dt);
  run.init();
  for (int k = 0; k < 150; ++k) run.step();
  const int node = m.nodes_with_tag("left")[0];
  EXPECT_NEAR(run.s.v[2 * node], 2.0, 1e-12);
  EXPECT_NEAR(run.s.u[2 * node], 2.0 * (run.s.t - 0.5e-6), 1e-15);
  EXPECT_EQ(run.s.a[2 * node], 0.0);
}

TEST(Dynamics, ReactionBalancesPrescribedDofs) {
  const Mesh m = rectangle_mesh(0.01, 0.01, 4, 4);
  const auto p = concrete();
  BoundaryCondition t;
  t.kind = BcKind::traction;
  t.component = 0;
  t.value = 1e6;
  t.tag = "right";
  ElasticRun run(m, p, {fix("left", 0), fix("bottom", 1), t}, 1e-9);
  run.init();
  for (int k = 0; k < 50; ++k) run.step();
  const Vector F = run.forces();
  const Vector react = run.dyn.reaction_forces(run.s, F, run.R);
  // Free DOFs carry no reaction; the residual M a + F - R - reaction vanishes everywhere.
  const Vector res = run.dyn.mass() * run.s.a + F - run.R - react;
  EXPECT_LT(res.lpNorm<Eigen::Infinity>(), 1e-6 * F.lpNorm<Eigen::Infinity>());
  for (int dof = 0; dof < react.size(); ++dof)
    if (!run.dyn.is_prescribed(dof)) EXPECT_EQ(react[dof], 0.0);
}
