#include "lipfrac/mesh_builders.hpp"

#include <cmath>
#include <map>

#include "lipfrac/error.hpp"

namespace lipfrac {

Mesh structured_mesh(double x0, double y0, double x1, double y1, int nx, int ny,
                     const FacetTagger& tagger, std::optional<Slit> slit) {
  if (nx < 1 || ny < 1 || !(x1 > x0) || !(y1 > y0)) throw ArgumentError("structured_mesh: bad extents");
  if (slit && (slit->row <= 0 || slit->row >= ny || slit->end_column < 1 || slit->end_column > nx)) {
    throw ArgumentError("structured_mesh: slit outside the grid interior");
  }
  const double dx = (x1 - x0) / nx, dy = (y1 - y0) / ny;
  std::vector<Point> nodes;
  nodes.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) nodes.emplace_back(x0 + i * dx, y0 + j * dy);

  std::map<int, int> duplicate;  // column -> duplicated node on the upper slit face
  if (slit) {
    for (int i = 0; i < slit->end_column; ++i) {
      duplicate[i] = static_cast<int>(nodes.size());
      nodes.push_back(nodes[slit->row * (nx + 1) + i]);
    }
  }
  // Cells in row `row` sit above the slit line and use the duplicated nodes.
  auto node = [&](int i, int j, int cell_row) {
    if (slit && j == slit->row && cell_row == slit->row) {
      if (auto it = duplicate.find(i); it != duplicate.end()) return it->second;
    }
    return j * (nx + 1) + i;
  };

  std::vector<Triangle> tris;
  tris.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = node(i, j, j), b = node(i + 1, j, j);
      const int c = node(i, j + 1, j), d = node(i + 1, j + 1, j);
      if ((i + j) % 2 == 0) {
        tris.push_back({a, b, d});
        tris.push_back({a, d, c});
      } else {
        tris.push_back({a, b, c});
        tris.push_back({b, d, c});
      }
    }
  }

  std::map<std::pair<int, int>, int> owners;
  for (const auto& t : tris)
    for (int k = 0; k < 3; ++k) {
      int u = t[k], v = t[(k + 1) % 3];
      ++owners[{std::min(u, v), std::max(u, v)}];
    }
  std::vector<BoundaryFacet> facets;
  for (const auto& t : tris)
    for (int k = 0; k < 3; ++k) {
      int u = t[k], v = t[(k + 1) % 3];
      if (owners[{std::min(u, v), std::max(u, v)}] == 1) {
        facets.push_back({{u, v}, tagger(0.5 * (nodes[u] + nodes[v]))});
      }
    }
  return Mesh(std::move(nodes), std::move(tris), std::move(facets));
}

Mesh rectangle_mesh(double width, double height, int nx, int ny) {
  const double tol = 1e-9 * std::max(width, height);
  auto tagger = [=](const Point& m) -> std::string {
    if (std::abs(m.y()) < tol) return "bottom";
    if (std::abs(m.y() - height) < tol) return "top";
    if (std::abs(m.x()) < tol) return "left";
    return "right";
  };
  return structured_mesh(0, 0, width, height, nx, ny, tagger);
}

Mesh notched_tension_half_mesh(double h) {
  const double W = 0.1, H = 0.02, notch = 0.05;
  const int nx = static_cast<int>(std::lround(W / h));
  const int ny = static_cast<int>(std::lround(H / h));
  if (nx % 2 != 0) throw ArgumentError("notched_tension_half_mesh: h must divide 50 mm");
  const double tol = 1e-6 * h;
  auto tagger = [=](const Point& m) -> std::string {
    if (std::abs(m.y()) < tol) return "load";
    if (std::abs(m.y() - H) < tol) return m.x() < notch ? "crack" : "symmetry";
    if (std::abs(m.x()) < tol) return "left";
    return "right";
  };
  return structured_mesh(0, 0, W, H, nx, ny, tagger);
}

Mesh kalthoff_half_mesh(double h) {
  const double L = 0.1, notch_y = 0.025, notch_len = 0.05;
  const int n = static_cast<int>(std::lround(L / h));
  const int row = static_cast<int>(std::lround(notch_y / (L / n)));
  const int end = static_cast<int>(std::lround(notch_len / (L / n)));
  if (std::abs(row * (L / n) - notch_y) > 1e-9 || std::abs(end * (L / n) - notch_len) > 1e-9) {
    throw ArgumentError("kalthoff_half_mesh: h must divide 25 mm");
  }
  const double tol = 1e-6 * h;
  auto tagger = [=](const Point& m) -> std::string {
    if (std::abs(m.y()) < tol) return "symmetry";
    if (std::abs(m.y() - notch_y) < tol && m.x() < notch_len) return "notch";
    if (std::abs(m.x()) < tol) return m.y() < notch_y ? "impact" : "left";
    if (std::abs(m.x() - L) < tol) return "right";
    return "top";
  };
  return structured_mesh(0, 0, L, L, n, n, tagger, Slit{row, end});
}

}  // namespace lipfrac
