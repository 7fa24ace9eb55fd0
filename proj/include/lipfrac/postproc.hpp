#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lipfrac/fem.hpp"
#include "lipfrac/mesh.hpp"

namespace lipfrac {

enum class CrackLengthMode { single, symmetric_branching };

/// Delta a = sum_e A_e (d_e - d_prev_e) / l, halved once t >= t_br in
/// symmetric_branching mode.
double crack_length_increment(const Vector& d, const Vector& d_prev, std::span<const double> areas,
                              double l, CrackLengthMode mode, double t,
                              std::optional<double> t_branch);

struct Rect {
  double xmin, ymin, xmax, ymax;
  bool contains(const Point& p) const {
    return p.x() >= xmin && p.x() <= xmax && p.y() >= ymin && p.y() <= ymax;
  }
};

/// a_i = sum over elements with centroid in D_i of A_e d_e / l.
std::pair<double, double> crack_length_regions(const Vector& d, std::span<const double> areas,
                                               std::span<const Point> centroids, double l,
                                               const Rect& d1, const Rect& d2);

struct BranchingOptions {
  Point notch_tip{0, 0};
  Eigen::Vector2d direction{1, 0};  ///< crack direction ahead of the notch
  double d_thresh = 0.95;
  double l = 1.0;                   ///< regularizing length; slice width l, separation 2l
  /// Transverse offset (from the tip, along the left normal of `direction`)
  /// of a symmetry line to mirror the damaged set about, for half models.
  std::optional<double> mirror_offset;
};

/// True if some slice across the crack direction, ahead of the notch, holds
/// damaged elements (d > d_thresh) in two clusters more than 2l apart.
bool is_branched(const Vector& d, std::span<const Point> centroids, const BranchingOptions& opts);

/// Earliest time in `history` (time, damage) at which is_branched holds.
std::optional<double> detect_branching(std::span<const std::pair<double, Vector>> history,
                                       std::span<const Point> centroids,
                                       const BranchingOptions& opts);

/// Angle in degrees between `direction` and the mean direction from `tip` to
/// damaged centroids (d > d_thresh) at distance in [r_min, r_max].
std::optional<double> crack_angle(const Vector& d, std::span<const Point> centroids, const Point& tip,
                                  const Eigen::Vector2d& direction, double d_thresh, double r_min,
                                  double r_max);

}  // namespace lipfrac
