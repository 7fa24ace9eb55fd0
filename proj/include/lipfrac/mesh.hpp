#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace lipfrac {

using Point = Eigen::Vector2d;
using Triangle = std::array<int, 3>;

struct BoundaryFacet {
  std::array<int, 2> nodes;
  std::string tag;
};

/// Linear triangle mesh of a 2D domain.
///
/// Construction validates and normalizes the input: clockwise triangles are
/// reoriented, unreferenced nodes are dropped (indices are compacted), and
/// per-element area and shortest edge are cached. The object is immutable
/// afterwards.
class Mesh {
 public:
  Mesh(std::vector<Point> nodes, std::vector<Triangle> triangles,
       std::vector<BoundaryFacet> facets);

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_elements() const { return static_cast<int>(triangles_.size()); }

  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<BoundaryFacet>& facets() const { return facets_; }

  const Point& node(int i) const { return nodes_[i]; }
  const Triangle& triangle(int e) const { return triangles_[e]; }

  double area(int e) const { return area_[e]; }
  double min_edge(int e) const { return min_edge_[e]; }
  const std::vector<double>& areas() const { return area_; }
  Point centroid(int e) const;
  double total_area() const;

  /// Indices into facets() carrying `tag`.
  std::vector<int> facets_with_tag(const std::string& tag) const;
  /// Sorted unique node indices touched by facets carrying `tag`.
  std::vector<int> nodes_with_tag(const std::string& tag) const;
  /// Sorted unique tag names.
  std::vector<std::string> tags() const;

 private:
  std::vector<Point> nodes_;
  std::vector<Triangle> triangles_;
  std::vector<BoundaryFacet> facets_;
  std::vector<double> area_;
  std::vector<double> min_edge_;
};

enum class MeshFormat { msh_ascii_v2, native_text };

/// Picks the format from the extension: `.msh` is gmsh, anything else native.
MeshFormat mesh_format_from_path(const std::filesystem::path& path);
MeshFormat parse_mesh_format(const std::string& name);

/// Gmsh physical group number -> facet tag. Unmapped groups fall back to
/// $PhysicalNames, then to the decimal group number.
using PhysicalTagMap = std::map<int, std::string>;

Mesh load_mesh(const std::filesystem::path& path, MeshFormat format,
               const PhysicalTagMap& physical_tags = {});
Mesh read_native_mesh(std::istream& in);
Mesh read_msh2_mesh(std::istream& in, const PhysicalTagMap& physical_tags = {});

void write_native_mesh(const Mesh& mesh, std::ostream& out);
void write_native_mesh(const Mesh& mesh, const std::filesystem::path& path);

/// Smallest edge length over all elements.
double min_element_size(const Mesh& mesh);

}  // namespace lipfrac
