#include "lipfrac/lipmesh.hpp"

#include <functional>
#include <limits>
#include <queue>
#include <unordered_map>

#include "lipfrac/error.hpp"

namespace lipfrac {

LipMesh::LipMesh(std::vector<Point> vertices, std::vector<LipEdge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
  const int n = num_vertices();
  offsets_.assign(n + 1, 0);
  for (const auto& e : edges_) {
    if (e.a < 0 || e.a >= n || e.b < 0 || e.b >= n || e.a == e.b) {
      throw ValidationError("lip-mesh edge with invalid endpoints");
    }
    if (!(e.length > 0)) throw ValidationError("lip-mesh edge with non-positive length");
    ++offsets_[e.a + 1];
    ++offsets_[e.b + 1];
  }
  for (int v = 0; v < n; ++v) offsets_[v + 1] += offsets_[v];
  adjacency_.resize(offsets_[n]);
  std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
  for (int k = 0; k < num_edges(); ++k) {
    adjacency_[fill[edges_[k].a]++] = {edges_[k].b, k};
    adjacency_[fill[edges_[k].b]++] = {edges_[k].a, k};
  }
}

LipMesh build_lipmesh(const Mesh& mesh) {
  std::vector<Point> centroids(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) centroids[e] = mesh.centroid(e);

  std::unordered_map<std::uint64_t, int> boundary;
  auto key = [](int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
  };
  for (const auto& f : mesh.facets()) boundary.emplace(key(f.nodes[0], f.nodes[1]), 0);

  std::unordered_map<std::uint64_t, int> first_owner;
  first_owner.reserve(3 * mesh.num_elements());
  std::vector<LipEdge> edges;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& t = mesh.triangle(e);
    for (int k = 0; k < 3; ++k) {
      const auto fk = key(t[k], t[(k + 1) % 3]);
      if (boundary.count(fk)) continue;
      auto [it, inserted] = first_owner.emplace(fk, e);
      if (!inserted) edges.push_back({it->second, e, (centroids[it->second] - centroids[e]).norm()});
    }
  }
  return LipMesh(std::move(centroids), std::move(edges));
}

std::vector<double> graph_distance(const LipMesh& lip, std::span<const int> sources) {
  if (sources.empty()) throw ArgumentError("graph_distance: empty source set");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(lip.num_vertices(), inf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (int s : sources) {
    if (s < 0 || s >= lip.num_vertices()) throw ArgumentError("graph_distance: source out of range");
    dist[s] = 0.0;
    heap.push({0.0, s});
  }
  while (!heap.empty()) {
    auto [dv, v] = heap.top();
    heap.pop();
    if (dv > dist[v]) continue;
    for (const auto& nb : lip.neighbors(v)) {
      const double cand = dv + lip.edge(nb.edge).length;
      if (cand < dist[nb.vertex]) {
        dist[nb.vertex] = cand;
        heap.push({cand, nb.vertex});
      }
    }
  }
  return dist;
}

}  // namespace lipfrac
