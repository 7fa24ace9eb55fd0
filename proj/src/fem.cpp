#include "lipfrac/fem.hpp"

#include <string>

#include "lipfrac/error.hpp"

namespace lipfrac {

namespace {

void check_damage_field(const Mesh& mesh, const Vector& d) {
  if (d.size() != mesh.num_elements()) throw ArgumentError("damage vector size mismatch");
  for (int e = 0; e < d.size(); ++e) {
    if (!(d[e] >= 0.0 && d[e] <= 1.0)) {
      throw ArgumentError("damage of element " + std::to_string(e) + " outside [0,1]");
    }
  }
}

}  // namespace

std::vector<ShapeGradients> shape_gradients(const Mesh& mesh) {
  std::vector<ShapeGradients> out(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& t = mesh.triangle(e);
    const double inv2a = 1.0 / (2.0 * mesh.area(e));
    for (int i = 0; i < 3; ++i) {
      const Point& pj = mesh.node(t[(i + 1) % 3]);
      const Point& pk = mesh.node(t[(i + 2) % 3]);
      out[e].dx[i] = (pj.y() - pk.y()) * inv2a;
      out[e].dy[i] = (pk.x() - pj.x()) * inv2a;
    }
  }
  return out;
}

std::vector<Strain2D> strain_from_displacement(const Mesh& mesh,
                                               std::span<const ShapeGradients> grads,
                                               const Vector& u) {
  if (u.size() != 2 * mesh.num_nodes()) throw ArgumentError("displacement vector size mismatch");
  std::vector<Strain2D> out(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& t = mesh.triangle(e);
    const auto& g = grads[e];
    double uxx = 0, uyy = 0, uxy = 0, uyx = 0;
    for (int i = 0; i < 3; ++i) {
      const double ux = u[2 * t[i]], uy = u[2 * t[i] + 1];
      uxx += ux * g.dx[i];
      uxy += ux * g.dy[i];
      uyx += uy * g.dx[i];
      uyy += uy * g.dy[i];
    }
    out[e] = {uxx, uyy, 0.5 * (uxy + uyx)};
  }
  return out;
}

std::vector<Strain2D> strain_from_displacement(const Mesh& mesh, const Vector& u) {
  const auto grads = shape_gradients(mesh);
  return strain_from_displacement(mesh, grads, u);
}

std::vector<StrainSplit> split_strains(std::span<const Strain2D> strains, const MaterialParams& p) {
  std::vector<StrainSplit> out(strains.size());
  for (std::size_t e = 0; e < strains.size(); ++e) out[e] = eigen_split(strains[e], p);
  return out;
}

SparseMatrix assemble_scalar_mass(const Mesh& mesh, double rho) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& t = mesh.triangle(e);
    const double m = rho * mesh.area(e) / 12.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.emplace_back(t[i], t[j], i == j ? 2 * m : m);
  }
  SparseMatrix M(mesh.num_nodes(), mesh.num_nodes());
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

SparseMatrix assemble_mass(const Mesh& mesh, double rho) {
  const SparseMatrix Ms = assemble_scalar_mass(mesh, rho);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(2 * Ms.nonZeros());
  for (int k = 0; k < Ms.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(Ms, k); it; ++it) {
      trip.emplace_back(2 * it.row(), 2 * it.col(), it.value());
      trip.emplace_back(2 * it.row() + 1, 2 * it.col() + 1, it.value());
    }
  SparseMatrix M(2 * mesh.num_nodes(), 2 * mesh.num_nodes());
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

Vector internal_forces(const Mesh& mesh, std::span<const ShapeGradients> grads,
                       std::span<const StrainSplit> splits, const Vector& damage,
                       const MaterialParams& p) {
  check_damage_field(mesh, damage);
  Vector F = Vector::Zero(2 * mesh.num_nodes());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Stress2D s = stress(splits[e], damage[e], p);
    const auto& t = mesh.triangle(e);
    const auto& g = grads[e];
    const double A = mesh.area(e);
    for (int i = 0; i < 3; ++i) {
      F[2 * t[i]] += A * (s.xx * g.dx[i] + s.xy * g.dy[i]);
      F[2 * t[i] + 1] += A * (s.xy * g.dx[i] + s.yy * g.dy[i]);
    }
  }
  return F;
}

Vector internal_forces(const Mesh& mesh, const Vector& u, const Vector& damage,
                       const MaterialParams& p) {
  const auto grads = shape_gradients(mesh);
  const auto strains = strain_from_displacement(mesh, grads, u);
  const auto splits = split_strains(strains, p);
  return internal_forces(mesh, grads, splits, damage, p);
}

Vector external_traction(const Mesh& mesh, std::span<const int> facets,
                         const Eigen::Vector2d& traction, double scale) {
  Vector R = Vector::Zero(2 * mesh.num_nodes());
  if (scale == 0.0 || traction.isZero(0.0)) return R;
  for (int f : facets) {
    const auto& nodes = mesh.facets().at(f).nodes;
    const double L = (mesh.node(nodes[0]) - mesh.node(nodes[1])).norm();
    for (int n : nodes) {
      R[2 * n] += scale * traction.x() * L / 2;
      R[2 * n + 1] += scale * traction.y() * L / 2;
    }
  }
  return R;
}

EnergyIntegrals energy_integrals(const Mesh& mesh, std::span<const StrainSplit> splits,
                                 const Vector& damage, const MaterialParams& p) {
  check_damage_field(mesh, damage);
  EnergyIntegrals out;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double A = mesh.area(e);
    out.potential += A * (detail::g(damage[e]) * splits[e].e_plus + splits[e].e_minus);
    out.dissipated += A * p.Yc * detail::h(damage[e]);
  }
  return out;
}

double kinetic_energy(const SparseMatrix& mass, const Vector& velocity) {
  return 0.5 * velocity.dot(mass * velocity);
}

}  // namespace lipfrac
