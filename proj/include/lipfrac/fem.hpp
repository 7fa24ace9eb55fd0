#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "lipfrac/constitutive.hpp"
#include "lipfrac/mesh.hpp"

namespace lipfrac {

// Nodal vectors interleave the two components: dof 2i is x, 2i+1 is y.
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Constant gradients of the three linear shape functions of a triangle.
struct ShapeGradients {
  std::array<double, 3> dx;
  std::array<double, 3> dy;
};

std::vector<ShapeGradients> shape_gradients(const Mesh& mesh);

std::vector<Strain2D> strain_from_displacement(const Mesh& mesh,
                                               std::span<const ShapeGradients> grads,
                                               const Vector& u);
std::vector<Strain2D> strain_from_displacement(const Mesh& mesh, const Vector& u);

std::vector<StrainSplit> split_strains(std::span<const Strain2D> strains, const MaterialParams& p);

/// Scalar consistent mass: element block (rho A / 12) [[2,1,1],[1,2,1],[1,1,2]].
SparseMatrix assemble_scalar_mass(const Mesh& mesh, double rho);
/// Full 2n x 2n consistent mass, block-diagonal per component.
SparseMatrix assemble_mass(const Mesh& mesh, double rho);

/// F_i = sum_e A_e sigma_e : grad_s N_i. Damage must lie in [0,1].
Vector internal_forces(const Mesh& mesh, std::span<const ShapeGradients> grads,
                       std::span<const StrainSplit> splits, const Vector& damage,
                       const MaterialParams& p);
Vector internal_forces(const Mesh& mesh, const Vector& u, const Vector& damage,
                       const MaterialParams& p);

/// R_i = int t . N_i dS over the given facets; each end node receives
/// scale * t * L / 2.
Vector external_traction(const Mesh& mesh, std::span<const int> facets,
                         const Eigen::Vector2d& traction, double scale = 1.0);

struct EnergyIntegrals {
  double potential = 0.0;   ///< sum A_e psi_e [J per unit thickness]
  double dissipated = 0.0;  ///< sum A_e Yc h(d_e)
};

EnergyIntegrals energy_integrals(const Mesh& mesh, std::span<const StrainSplit> splits,
                                 const Vector& damage, const MaterialParams& p);

double kinetic_energy(const SparseMatrix& mass, const Vector& velocity);

}  // namespace lipfrac
