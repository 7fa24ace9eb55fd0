#include <gtest/gtest.h>

#include <cmath>

#include "lipfrac/mesh_builders.hpp"
#include "lipfrac/postproc.hpp"

using namespace lipfrac;

namespace {

struct Grid {
  Mesh mesh = rectangle_mesh(0.1, 0.04, 100, 40);
  std::vector<Point> centroids;
  Grid() {
    for (int e = 0; e < mesh.num_elements(); ++e) centroids.push_back(mesh.centroid(e));
  }
  Vector zeros() const { return Vector::Zero(mesh.num_elements()); }
};

// Damage 1 on elements within `half_width` of the polyline a-b.
void paint_segment(const Grid& g, Vector& d, Point a, Point b, double half_width) {
  for (int e = 0; e < g.mesh.num_elements(); ++e) {
    const Point c = g.centroids[e];
    const Eigen::Vector2d ab = b - a;
    const double t = std::clamp((c - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    if ((a + t * ab - c).norm() <= half_width) d[e] = 1.0;
  }
}

}  // namespace

TEST(CrackLength, Increments) {
  const std::vector<double> areas{2e-6, 2e-6};
  Vector d(2), prev = Vector::Zero(2);
  EXPECT_EQ(crack_length_increment(prev, prev, areas, 1e-3, CrackLengthMode::single, 0, std::nullopt), 0.0);
  d << 1, 0;
  EXPECT_DOUBLE_EQ(crack_length_increment(d, prev, areas, 1e-3, CrackLengthMode::single, 0, std::nullopt), 2e-3);
  d << 0.5, 0.5;
  EXPECT_DOUBLE_EQ(crack_length_increment(d, prev, areas, 1e-3, CrackLengthMode::single, 0, std::nullopt), 2e-3);
  EXPECT_DOUBLE_EQ(crack_length_increment(d, prev, areas, 1e-3, CrackLengthMode::symmetric_branching, 5, 4.0), 1e-3);
  EXPECT_DOUBLE_EQ(crack_length_increment(d, prev, areas, 1e-3, CrackLengthMode::symmetric_branching, 3, 4.0), 2e-3);
  EXPECT_DOUBLE_EQ(crack_length_increment(d, prev, areas, 1e-3, CrackLengthMode::single, 5, 4.0), 2e-3);
}

TEST(CrackLength, Regions) {
  Grid g;
  Vector d = g.zeros();
  EXPECT_EQ(crack_length_regions(d, g.mesh.areas(), g.centroids, 1e-3, {0, 0, 0.05, 0.04}, {0.05, 0, 0.1, 0.04}),
            std::make_pair(0.0, 0.0));
  // Band 10 mm x 2 mm fully damaged inside D1: a1 = B / l.
  for (int e = 0; e < g.mesh.num_elements(); ++e) {
    const Point c = g.centroids[e];
    if (c.x() > 0.01 && c.x() < 0.02 && c.y() > 0.01 && c.y() < 0.012) d[e] = 1;
  }
  const auto [a1, a2] =
      crack_length_regions(d, g.mesh.areas(), g.centroids, 1e-3, {0, 0, 0.05, 0.04}, {0.05, 0, 0.1, 0.04});
  EXPECT_NEAR(a1, 2e-5 / 1e-3, 1e-12);
  EXPECT_EQ(a2, 0.0);
}

TEST(Branching, StraightCrackIsNotBranched) {
  Grid g;
  Vector d = g.zeros();
  paint_segment(g, d, {0.03, 0.02}, {0.09, 0.02}, 1e-3);
  BranchingOptions o;
  o.notch_tip = {0.03, 0.02};
  o.l = 1e-3;
  EXPECT_FALSE(is_branched(d, g.centroids, o));
}

TEST(Branching, YShapeIsBranched) {
  Grid g;
  BranchingOptions o;
  o.notch_tip = {0.03, 0.02};
  o.l = 1e-3;
  std::vector<std::pair<double, Vector>> history;
  Vector d = g.zeros();
  paint_segment(g, d, {0.03, 0.02}, {0.06, 0.02}, 1e-3);
  history.emplace_back(1.0, d);
  paint_segment(g, d, {0.06, 0.02}, {0.065, 0.02}, 1e-3);
  history.emplace_back(2.0, d);
  paint_segment(g, d, {0.065, 0.02}, {0.09, 0.035}, 1e-3);
  paint_segment(g, d, {0.065, 0.02}, {0.09, 0.005}, 1e-3);
  history.emplace_back(3.0, d);
  const auto t = detect_branching(history, g.centroids, o);
  ASSERT_TRUE(t.has_value());
  EXPECT_EQ(*t, 3.0);
}

TEST(Branching, MirroredHalfModel) {
  // One branch leaving the symmetry line y = 0.02 is a branch of the full model.
  Grid g;
  Vector d = g.zeros();
  paint_segment(g, d, {0.03, 0.0195}, {0.05, 0.0195}, 0.6e-3);
  paint_segment(g, d, {0.05, 0.0195}, {0.09, 0.005}, 1e-3);
  BranchingOptions o;
  o.notch_tip = {0.03, 0.02};
  o.l = 1e-3;
  EXPECT_FALSE(is_branched(d, g.centroids, o));
  o.mirror_offset = 0.0;
  EXPECT_TRUE(is_branched(d, g.centroids, o));
}

TEST(CrackAngle, StraightInclinedCrack) {
  Grid g;
  Vector d = g.zeros();
  const double deg = 60.0, rad = deg * M_PI / 180;
  const Point tip{0.03, 0.005};
  paint_segment(g, d, tip, tip + 0.03 * Eigen::Vector2d(std::cos(rad), std::sin(rad)), 0.8e-3);
  const auto a = crack_angle(d, g.centroids, tip, {1, 0}, 0.95, 3e-3, 0.03);
  ASSERT_TRUE(a.has_value());
  EXPECT_NEAR(*a, deg, 2.0);
  EXPECT_FALSE(crack_angle(g.zeros(), g.centroids, tip, {1, 0}, 0.95, 3e-3, 0.03).has_value());
}
