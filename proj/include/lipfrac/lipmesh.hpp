#pragma once

#include <span>
#include <vector>

#include "lipfrac/mesh.hpp"

namespace lipfrac {

struct LipEdge {
  int a;
  int b;
  double length;
};

/// Dual graph of a Mesh: one vertex per triangle (its centroid), one edge per
/// interior facet. Damage values and Lipschitz constraints live on this graph.
class LipMesh {
 public:
  struct Neighbor {
    int vertex;
    int edge;
  };

  LipMesh(std::vector<Point> vertices, std::vector<LipEdge> edges);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<LipEdge>& edges() const { return edges_; }
  const LipEdge& edge(int k) const { return edges_[k]; }

  std::span<const Neighbor> neighbors(int v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }

 private:
  std::vector<Point> vertices_;
  std::vector<LipEdge> edges_;
  std::vector<int> offsets_;
  std::vector<Neighbor> adjacency_;
};

LipMesh build_lipmesh(const Mesh& mesh);

/// Multi-source shortest-path distance along lip-mesh edges. Vertices not
/// reachable from any source get +infinity.
std::vector<double> graph_distance(const LipMesh& lip, std::span<const int> sources);

}  // namespace lipfrac
