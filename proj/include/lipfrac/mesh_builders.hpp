#pragma once

#include <functional>
#include <optional>
#include <string>

#include "lipfrac/mesh.hpp"

namespace lipfrac {

/// Horizontal zero-width slit along grid row `row`, spanning columns [0, end_column).
/// Nodes strictly left of `end_column` are duplicated so that the cells above
/// and below the slit do not share facets.
struct Slit {
  int row;
  int end_column;
};

/// Maps the midpoint of a boundary facet to its tag.
using FacetTagger = std::function<std::string(const Point&)>;

/// Structured triangulation of [x0,x1]x[y0,y1] with nx by ny cells, each split
/// in two along alternating diagonals. Every facet owned by one triangle is
/// tagged with `tagger`.
Mesh structured_mesh(double x0, double y0, double x1, double y1, int nx, int ny,
                     const FacetTagger& tagger, std::optional<Slit> slit = std::nullopt);

/// Rectangle with facets tagged left/right/bottom/top.
Mesh rectangle_mesh(double width, double height, int nx, int ny);

/// Bottom half of the edge-notched tension specimen (100 mm x 40 mm, notch
/// 50 mm): [0,0.1]x[0,0.02] m. Tags: "load" (y=0), "crack" (y=0.02, x<0.05),
/// "symmetry" (y=0.02, x>=0.05), "left", "right".
Mesh notched_tension_half_mesh(double h);

/// Upper half of the Kalthoff-Winkler plate: [0,0.1]x[0,0.1] m with a slit
/// along y=0.025 for x<0.05. Tags: "symmetry" (y=0), "impact" (x=0, y<0.025),
/// "notch" (both slit faces), "left", "right", "top".
Mesh kalthoff_half_mesh(double h);

}  // namespace lipfrac
