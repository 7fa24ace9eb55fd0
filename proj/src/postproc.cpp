#include "lipfrac/postproc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "lipfrac/error.hpp"

namespace lipfrac {

double crack_length_increment(const Vector& d, const Vector& d_prev, std::span<const double> areas,
                              double l, CrackLengthMode mode, double t,
                              std::optional<double> t_branch) {
  if (d.size() != d_prev.size() || d.size() != static_cast<long>(areas.size())) {
    throw ArgumentError("crack_length_increment: size mismatch");
  }
  double da = 0;
  for (int e = 0; e < d.size(); ++e) da += areas[e] * (d[e] - d_prev[e]);
  da /= l;
  if (mode == CrackLengthMode::symmetric_branching && t_branch && t >= *t_branch) da *= 0.5;
  return da;
}

std::pair<double, double> crack_length_regions(const Vector& d, std::span<const double> areas,
                                               std::span<const Point> centroids, double l,
                                               const Rect& d1, const Rect& d2) {
  double a1 = 0, a2 = 0;
  for (int e = 0; e < d.size(); ++e) {
    if (d1.contains(centroids[e])) a1 += areas[e] * d[e];
    if (d2.contains(centroids[e])) a2 += areas[e] * d[e];
  }
  return {a1 / l, a2 / l};
}

bool is_branched(const Vector& d, std::span<const Point> centroids, const BranchingOptions& opts) {
  const Eigen::Vector2d dir = opts.direction.normalized();
  const Eigen::Vector2d normal(-dir.y(), dir.x());
  const double width = opts.l;
  std::map<long, std::vector<double>> slices;
  for (int e = 0; e < d.size(); ++e) {
    if (!(d[e] > opts.d_thresh)) continue;
    const Eigen::Vector2d r = centroids[e] - opts.notch_tip;
    const double along = r.dot(dir);
    if (along <= 0) continue;
    const double across = r.dot(normal);
    auto& slice = slices[static_cast<long>(std::floor(along / width))];
    slice.push_back(across);
    if (opts.mirror_offset) slice.push_back(2 * *opts.mirror_offset - across);
  }
  for (auto& [key, eta] : slices) {
    std::sort(eta.begin(), eta.end());
    for (std::size_t k = 1; k < eta.size(); ++k)
      if (eta[k] - eta[k - 1] > 2 * opts.l) return true;
  }
  return false;
}

std::optional<double> detect_branching(std::span<const std::pair<double, Vector>> history,
                                       std::span<const Point> centroids,
                                       const BranchingOptions& opts) {
  for (const auto& [t, d] : history)
    if (is_branched(d, centroids, opts)) return t;
  return std::nullopt;
}

std::optional<double> crack_angle(const Vector& d, std::span<const Point> centroids, const Point& tip,
                                  const Eigen::Vector2d& direction, double d_thresh, double r_min,
                                  double r_max) {
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  int count = 0;
  for (int e = 0; e < d.size(); ++e) {
    if (!(d[e] > d_thresh)) continue;
    const Eigen::Vector2d r = centroids[e] - tip;
    const double dist = r.norm();
    if (dist < r_min || dist > r_max) continue;
    sum += r / dist;
    ++count;
  }
  if (count == 0 || sum.norm() == 0) return std::nullopt;
  const Eigen::Vector2d dir = direction.normalized();
  const double c = std::clamp(sum.normalized().dot(dir), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

}  // namespace lipfrac
