#include "lipfrac/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "lipfrac/error.hpp"

namespace lipfrac {

KinematicState KinematicState::zeros(int num_nodes) {
  KinematicState s;
  s.u = s.v = s.a = s.u_p = s.v_p = Vector::Zero(2 * num_nodes);
  return s;
}

TimeControl critical_timestep(const Mesh& mesh, const MaterialParams& p, double cfl_factor,
                              double t_end) {
  if (!(cfl_factor > 0 && cfl_factor < 1)) throw ArgumentError("cfl_factor must lie in (0,1)");
  if (!(t_end >= 0)) throw ArgumentError("t_end must be non-negative");
  TimeControl tc;
  tc.cfl_factor = cfl_factor;
  tc.dt_critical = min_element_size(mesh) / wave_speeds(p).c_d;
  tc.dt = cfl_factor * tc.dt_critical;
  tc.t_end = t_end;
  tc.n_steps = static_cast<long>(std::floor(t_end / tc.dt * (1 + 1e-12))) + 1;
  return tc;
}

double stable_timestep_estimate(const Mesh& mesh, const MaterialParams& p) {
  const auto grads = shape_gradients(mesh);
  const int n = 2 * mesh.num_nodes();
  Eigen::Matrix3d D;
  D << p.lambda + 2 * p.mu, p.lambda, 0, p.lambda, p.lambda + 2 * p.mu, 0, 0, 0, p.mu;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(36 * mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    Eigen::Matrix<double, 3, 6> B = Eigen::Matrix<double, 3, 6>::Zero();
    for (int i = 0; i < 3; ++i) {
      B(0, 2 * i) = grads[e].dx[i];
      B(1, 2 * i + 1) = grads[e].dy[i];
      B(2, 2 * i) = grads[e].dy[i];
      B(2, 2 * i + 1) = grads[e].dx[i];
    }
    const Eigen::Matrix<double, 6, 6> Ke = mesh.area(e) * B.transpose() * D * B;
    const auto& tri = mesh.triangle(e);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) trips.emplace_back(2 * tri[i / 2] + i % 2, 2 * tri[j / 2] + j % 2, Ke(i, j));
  }
  SparseMatrix K(n, n);
  K.setFromTriplets(trips.begin(), trips.end());
  const SparseMatrix M = assemble_mass(mesh, p.rho);
  Eigen::SimplicialLLT<SparseMatrix> llt(M);
  if (llt.info() != Eigen::Success) throw SolverError("mass matrix factorization failed");

  // Power iteration on M^-1 K. The start alternates in sign node to node so
  // that it carries the high-frequency content.
  Vector x(n);
  for (int i = 0; i < n; ++i) x[i] = ((i / 2) % 2 ? -1.0 : 1.0) * (1.0 + 0.1 * std::sin(1.0 + i));
  double omega2 = 0;
  for (int it = 0; it < 5000; ++it) {
    const Vector Kx = K * x;
    const double rq = x.dot(Kx) / x.dot(M * x);
    x = llt.solve(Kx);
    x /= x.norm();
    if (it > 10 && std::abs(rq - omega2) <= 1e-7 * rq) {
      omega2 = rq;
      break;
    }
    omega2 = rq;
  }
  return 2.0 / std::sqrt(omega2);
}

double TimeProfile::factor(double t) const {
  if (shape == Shape::ramp && rise_time > 0) return std::clamp(t / rise_time, 0.0, 1.0);
  return 1.0;
}

double TimeProfile::rate(double t) const {
  if (shape == Shape::ramp && rise_time > 0 && t >= 0 && t < rise_time) return 1.0 / rise_time;
  return 0.0;
}

double TimeProfile::integral(double t) const {
  if (shape == Shape::ramp && rise_time > 0) {
    return t < rise_time ? 0.5 * t * t / rise_time : t - 0.5 * rise_time;
  }
  return t;
}

void predict(KinematicState& s, double dt) {
  s.u_p = s.u + dt * s.v + 0.5 * dt * dt * s.a;
  s.v_p = s.v + 0.5 * dt * s.a;
}

Vector correct_velocity(const Vector& v_p, const Vector& a, double dt) { return v_p + 0.5 * dt * a; }

// ---------------------------------------------------------------------------

struct ExplicitDynamics::ComponentSolver {
  int component;
  std::vector<int> free_nodes;
  std::vector<int> fixed_nodes;
  SparseMatrix coupling;  // M[free, fixed]
  Eigen::SimplicialLLT<SparseMatrix> llt;
};

ExplicitDynamics::ExplicitDynamics(const Mesh& mesh, const MaterialParams& p,
                                   std::vector<BoundaryCondition> bcs, double dt)
    : mesh_(&mesh), dt_(dt), bcs_(std::move(bcs)) {
  if (!(dt > 0)) throw ArgumentError("time step must be positive");
  const int nn = mesh.num_nodes();
  prescription_.assign(2 * nn, -1);

  Eigen::AlignedBox2d bbox;
  for (const auto& x : mesh.nodes()) bbox.extend(x);
  const double eps = 1e-9 * bbox.diagonal().norm();

  for (int b = 0; b < static_cast<int>(bcs_.size()); ++b) {
    const auto& bc = bcs_[b];
    if (bc.component != 0 && bc.component != 1) throw ConfigError("boundary condition component must be x or y");
    if (bc.kind == BcKind::traction) {
      if (bc.box) throw ConfigError("traction conditions apply to facet tags only");
      auto facets = mesh.facets_with_tag(bc.tag);
      if (facets.empty()) throw ConfigError("no facets tagged '" + bc.tag + "'");
      Eigen::Vector2d t = Eigen::Vector2d::Zero();
      t[bc.component] = bc.value;
      tractions_.push_back({std::move(facets), t});
      traction_bc_.push_back(b);
      continue;
    }
    std::vector<int> nodes;
    if (!bc.tag.empty()) {
      nodes = mesh.nodes_with_tag(bc.tag);
      if (nodes.empty()) throw ConfigError("no facets tagged '" + bc.tag + "'");
    }
    if (bc.box) {
      const auto& bx = *bc.box;
      for (int i = 0; i < nn; ++i) {
        const auto& x = mesh.node(i);
        if (x.x() >= bx[0] - eps && x.y() >= bx[1] - eps && x.x() <= bx[2] + eps && x.y() <= bx[3] + eps) {
          nodes.push_back(i);
        }
      }
      std::sort(nodes.begin(), nodes.end());
      nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    }
    if (nodes.empty()) throw ConfigError("boundary condition selects no nodes");
    for (int i : nodes) {
      const int dof = 2 * i + bc.component;
      if (prescription_[dof] >= 0 && prescription_[dof] != b) {
        throw ConfigError("DOF " + std::to_string(dof) + " carries two kinematic prescriptions");
      }
      prescription_[dof] = b;
    }
  }
  for (int dof = 0; dof < 2 * nn; ++dof)
    if (prescription_[dof] >= 0) prescribed_.push_back(dof);

  mass_ = assemble_mass(mesh, p.rho);
  const SparseMatrix Ms = assemble_scalar_mass(mesh, p.rho);
  for (int c = 0; c < 2; ++c) {
    auto solver = std::make_unique<ComponentSolver>();
    solver->component = c;
    std::vector<int> slot(nn);
    for (int i = 0; i < nn; ++i) {
      if (prescription_[2 * i + c] >= 0) {
        slot[i] = static_cast<int>(solver->fixed_nodes.size());
        solver->fixed_nodes.push_back(i);
      } else {
        slot[i] = static_cast<int>(solver->free_nodes.size());
        solver->free_nodes.push_back(i);
      }
    }
    std::vector<Eigen::Triplet<double>> ff, fp;
    for (int k = 0; k < Ms.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(Ms, k); it; ++it) {
        const int r = static_cast<int>(it.row()), col = static_cast<int>(it.col());
        const bool rf = prescription_[2 * r + c] < 0, cf = prescription_[2 * col + c] < 0;
        if (rf && cf) ff.emplace_back(slot[r], slot[col], it.value());
        if (rf && !cf) fp.emplace_back(slot[r], slot[col], it.value());
      }
    const int nf = static_cast<int>(solver->free_nodes.size());
    const int np = static_cast<int>(solver->fixed_nodes.size());
    SparseMatrix Mff(nf, nf);
    Mff.setFromTriplets(ff.begin(), ff.end());
    solver->coupling.resize(nf, np);
    solver->coupling.setFromTriplets(fp.begin(), fp.end());
    if (nf > 0) {
      solver->llt.compute(Mff);
      if (solver->llt.info() != Eigen::Success) {
        throw ConfigError("consistent mass matrix is not positive definite on the free DOFs");
      }
    }
    solvers_.push_back(std::move(solver));
  }
}

ExplicitDynamics::~ExplicitDynamics() = default;
ExplicitDynamics::ExplicitDynamics(ExplicitDynamics&&) noexcept = default;
ExplicitDynamics& ExplicitDynamics::operator=(ExplicitDynamics&&) noexcept = default;

void ExplicitDynamics::apply_bcs(KinematicState& s) const {
  for (int dof : prescribed_) {
    const auto& bc = bcs_[prescription_[dof]];
    if (bc.kind == BcKind::displacement) {
      s.u[dof] = bc.value * bc.profile.factor(s.t);
      s.v[dof] = bc.value * bc.profile.rate(s.t);
      s.a[dof] = 0.0;
    } else {
      s.u[dof] = bc.value * bc.profile.integral(s.t);
      s.v[dof] = bc.value * bc.profile.factor(s.t);
      s.a[dof] = bc.value * bc.profile.rate(s.t);
    }
  }
}

void ExplicitDynamics::predict(KinematicState& s) const {
  lipfrac::predict(s, dt_);
  s.u = s.u_p;
  s.t += dt_;
  for (int dof : prescribed_) {
    const auto& bc = bcs_[prescription_[dof]];
    s.u[dof] = bc.value * (bc.kind == BcKind::displacement ? bc.profile.factor(s.t) : bc.profile.integral(s.t));
  }
}

Vector ExplicitDynamics::external_forces(double t) const {
  Vector R = Vector::Zero(2 * mesh_->num_nodes());
  for (std::size_t k = 0; k < tractions_.size(); ++k) {
    const auto& bc = bcs_[traction_bc_[k]];
    R += external_traction(*mesh_, tractions_[k].first, tractions_[k].second, bc.profile.factor(t));
  }
  return R;
}

void ExplicitDynamics::solve_acceleration(KinematicState& s, const Vector& F, const Vector& R) const {
  // Prescribed accelerations first; they enter the free equations through M_fp.
  for (int dof : prescribed_) {
    const auto& bc = bcs_[prescription_[dof]];
    s.a[dof] = bc.kind == BcKind::velocity ? bc.value * bc.profile.rate(s.t) : 0.0;
  }
  for (const auto& solver : solvers_) {
    const int c = solver->component;
    const int nf = static_cast<int>(solver->free_nodes.size());
    if (nf == 0) continue;
    Vector rhs(nf);
    for (int k = 0; k < nf; ++k) {
      const int dof = 2 * solver->free_nodes[k] + c;
      rhs[k] = R[dof] - F[dof];
    }
    if (!solver->fixed_nodes.empty()) {
      Vector ap(solver->fixed_nodes.size());
      for (std::size_t k = 0; k < solver->fixed_nodes.size(); ++k) ap[k] = s.a[2 * solver->fixed_nodes[k] + c];
      rhs -= solver->coupling * ap;
    }
    const Vector af = solver->llt.solve(rhs);
    for (int k = 0; k < nf; ++k) s.a[2 * solver->free_nodes[k] + c] = af[k];
  }
}

void ExplicitDynamics::correct_velocity(KinematicState& s) const {
  s.v = lipfrac::correct_velocity(s.v_p, s.a, dt_);
  for (int dof : prescribed_) {
    const auto& bc = bcs_[prescription_[dof]];
    s.v[dof] = bc.value * (bc.kind == BcKind::velocity ? bc.profile.factor(s.t) : bc.profile.rate(s.t));
  }
}

Vector ExplicitDynamics::reaction_forces(const KinematicState& s, const Vector& F, const Vector& R) const {
  Vector out = Vector::Zero(F.size());
  if (prescribed_.empty()) return out;
  const Vector Ma = mass_ * s.a;
  for (int dof : prescribed_) out[dof] = Ma[dof] + F[dof] - R[dof];
  return out;
}

}  // namespace lipfrac
