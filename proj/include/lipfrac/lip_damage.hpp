#pragma once

#include <span>
#include <vector>

#include "lipfrac/constitutive.hpp"
#include "lipfrac/convex_solver.hpp"
#include "lipfrac/fem.hpp"
#include "lipfrac/lipmesh.hpp"

namespace lipfrac {

struct DamageSolverOptions {
  double kkt_tol = 1e-8;    ///< KKT residual on the scaled region problem
  double gap_tol = 1e-9;    ///< bounds closer than this count as equal
  double local_tol = 1e-12; ///< tolerance in d of the per-element solve
  int max_iter = 200;
};

/// Per-element damage fields, indexed like the mesh triangles / lip vertices.
struct DamageState {
  Vector d;        ///< current damage
  Vector d_n;      ///< damage of the previous step
  Vector d_loc;    ///< unregularized local minimizer
  Vector d_upper;  ///< upper bound
  Vector d_lower;  ///< lower bound

  static DamageState zeros(int n);
};

struct DamageBounds {
  Vector lower;
  Vector upper;
};

/// Link from a region element to an element outside the region whose damage
/// is frozen during the region solve.
struct FrozenLink {
  int local;    ///< index into LipRegion::elements
  int outside;  ///< element index
  double length;
};

/// Connected set of elements whose bounds differ.
struct LipRegion {
  std::vector<int> elements;     ///< sorted element indices
  std::vector<int> edges;        ///< lip edges with both ends in the region
  std::vector<FrozenLink> frozen;
};

struct DamageUpdateStats {
  int regions = 0;
  int region_elements = 0;
  int solver_iterations = 0;
  double max_residual = 0.0;
};

/// argmin over [d_n, 1] of g(d) e_plus + Yc h(d). Safeguarded Newton on the
/// derivative with bisection fallback.
double local_damage_solve(double e_plus, double d_n, double Yc, double tol = 1e-12);

/// d_upper(x) = max_y d_loc(y) - dist(x,y)/l and d_lower(x) = min_y d_loc(y) + dist(x,y)/l
/// with dist the lip-mesh graph distance, by max/min-plus Dijkstra sweeps
/// seeded from every vertex.
DamageBounds compute_bounds(const LipMesh& lip, const Vector& d_loc, double l);

/// Connected components of {i : upper_i - lower_i > gap_tol} over lip edges.
std::vector<LipRegion> extract_regions(const LipMesh& lip, const DamageBounds& bounds,
                                       double gap_tol);

/// Lipschitz-constrained minimization of sum_e A_e [g(d_e) e_plus_e + Yc h(d_e)]
/// on one region, with outside values taken from `d_frozen`. Returns the
/// damage of the region elements in the order of `region.elements`.
/// Throws SolverError if the KKT residual does not reach options.kkt_tol.
Vector constrained_damage_solve(const LipMesh& lip, const LipRegion& region, int region_id,
                                std::span<const double> e_plus, std::span<const double> areas,
                                const Vector& d_n, const Vector& d_frozen,
                                const DamageBounds& bounds, const MaterialParams& p,
                                const DamageSolverOptions& options);

/// Full damage step: local solve, bounds, regions, regional constrained solves.
DamageState damage_update(const LipMesh& lip, std::span<const double> e_plus,
                          std::span<const double> areas, const Vector& d_previous,
                          const MaterialParams& p, const DamageSolverOptions& options,
                          DamageUpdateStats* stats = nullptr);

/// The same minimization over the whole lip-mesh without the bounds shortcut.
/// Reference path; cost grows with the full element count.
Vector solve_damage_whole_domain(const LipMesh& lip, std::span<const double> e_plus,
                                 std::span<const double> areas, const Vector& d_n,
                                 const MaterialParams& p, const DamageSolverOptions& options);

/// sum_e A_e [g(d_e) e_plus_e + Yc h(d_e)]
double damage_objective(std::span<const double> e_plus, std::span<const double> areas,
                        const Vector& d, double Yc);

/// max over lip edges of |d_a - d_b| l / length; <= 1 means Lipschitz-feasible.
double max_lipschitz_ratio(const LipMesh& lip, const Vector& d, double l);

std::vector<double> tensile_energies(std::span<const StrainSplit> splits);

}  // namespace lipfrac
