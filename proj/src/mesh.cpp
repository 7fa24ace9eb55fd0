#include "lipfrac/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "lipfrac/error.hpp"

namespace lipfrac {

namespace {

double signed_double_area(const Point& a, const Point& b, const Point& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
}

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

Mesh::Mesh(std::vector<Point> nodes, std::vector<Triangle> triangles,
           std::vector<BoundaryFacet> facets) {
  const int n = static_cast<int>(nodes.size());
  for (std::size_t e = 0; e < triangles.size(); ++e) {
    for (int v : triangles[e]) {
      if (v < 0 || v >= n) {
        throw ValidationError("triangle " + std::to_string(e) + " references node " +
                              std::to_string(v) + " out of range [0," + std::to_string(n) + ")");
      }
    }
  }
  for (std::size_t f = 0; f < facets.size(); ++f) {
    for (int v : facets[f].nodes) {
      if (v < 0 || v >= n) {
        throw ValidationError("facet " + std::to_string(f) + " references node " +
                              std::to_string(v) + " out of range");
      }
    }
  }

  // Compact away nodes no triangle uses.
  std::vector<int> remap(n, -1);
  for (const auto& t : triangles)
    for (int v : t) remap[v] = 0;
  int next = 0;
  for (int i = 0; i < n; ++i)
    if (remap[i] == 0) remap[i] = next++;
  nodes_.reserve(next);
  for (int i = 0; i < n; ++i)
    if (remap[i] >= 0) nodes_.push_back(nodes[i]);

  triangles_.reserve(triangles.size());
  area_.reserve(triangles.size());
  min_edge_.reserve(triangles.size());
  for (std::size_t e = 0; e < triangles.size(); ++e) {
    Triangle t{remap[triangles[e][0]], remap[triangles[e][1]], remap[triangles[e][2]]};
    const Point& a = nodes_[t[0]];
    const Point& b = nodes_[t[1]];
    const Point& c = nodes_[t[2]];
    double twice_area = signed_double_area(a, b, c);
    const double l0 = (b - a).norm(), l1 = (c - b).norm(), l2 = (a - c).norm();
    const double lmax = std::max({l0, l1, l2});
    if (!(std::abs(twice_area) > 1e-12 * lmax * lmax)) {
      throw ValidationError("triangle " + std::to_string(e) + " is degenerate (zero area)");
    }
    if (twice_area < 0) {
      std::swap(t[1], t[2]);
      twice_area = -twice_area;
    }
    triangles_.push_back(t);
    area_.push_back(0.5 * twice_area);
    min_edge_.push_back(std::min({l0, l1, l2}));
  }

  std::unordered_map<std::uint64_t, int> edge_count;
  for (const auto& t : triangles_)
    for (int k = 0; k < 3; ++k) ++edge_count[edge_key(t[k], t[(k + 1) % 3])];

  facets_.reserve(facets.size());
  for (std::size_t f = 0; f < facets.size(); ++f) {
    const int a = remap[facets[f].nodes[0]];
    const int b = remap[facets[f].nodes[1]];
    if (a < 0 || b < 0) {
      throw ValidationError("facet " + std::to_string(f) + " touches a node no triangle uses");
    }
    auto it = edge_count.find(edge_key(a, b));
    const int owners = it == edge_count.end() ? 0 : it->second;
    if (owners != 1) {
      throw ValidationError("facet " + std::to_string(f) + " (" + facets[f].tag + ") belongs to " +
                            std::to_string(owners) + " triangles, expected exactly 1");
    }
    facets_.push_back({{a, b}, facets[f].tag});
  }
}

Point Mesh::centroid(int e) const {
  const auto& t = triangles_[e];
  return (nodes_[t[0]] + nodes_[t[1]] + nodes_[t[2]]) / 3.0;
}

double Mesh::total_area() const { return std::accumulate(area_.begin(), area_.end(), 0.0); }

std::vector<int> Mesh::facets_with_tag(const std::string& tag) const {
  std::vector<int> out;
  for (int f = 0; f < static_cast<int>(facets_.size()); ++f)
    if (facets_[f].tag == tag) out.push_back(f);
  return out;
}

std::vector<int> Mesh::nodes_with_tag(const std::string& tag) const {
  std::set<int> s;
  for (const auto& f : facets_)
    if (f.tag == tag) s.insert(f.nodes.begin(), f.nodes.end());
  return {s.begin(), s.end()};
}

std::vector<std::string> Mesh::tags() const {
  std::set<std::string> s;
  for (const auto& f : facets_) s.insert(f.tag);
  return {s.begin(), s.end()};
}

double min_element_size(const Mesh& mesh) {
  double h = std::numeric_limits<double>::infinity();
  for (int e = 0; e < mesh.num_elements(); ++e) h = std::min(h, mesh.min_edge(e));
  return h;
}

MeshFormat mesh_format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".msh" ? MeshFormat::msh_ascii_v2 : MeshFormat::native_text;
}

MeshFormat parse_mesh_format(const std::string& name) {
  if (name == "msh" || name == "msh_ascii_v2" || name == "gmsh") return MeshFormat::msh_ascii_v2;
  if (name == "native" || name == "native_text") return MeshFormat::native_text;
  throw ArgumentError("unknown mesh format '" + name + "'");
}

// ---------------------------------------------------------------------------
// Line reader shared by both parsers: skips blank lines and '#' comments and
// keeps the current line number for error messages.

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++lineno_;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return true;
    }
    return false;
  }

  std::string require(const char* what) {
    std::string line;
    if (!next(line)) throw ParseError(std::string("unexpected end of file, expected ") + what, lineno_ + 1);
    return line;
  }

  int line() const { return lineno_; }

 private:
  std::istream& in_;
  int lineno_ = 0;
};

template <typename... T>
void scan(const std::string& line, int lineno, const char* what, T&... out) {
  std::istringstream ss(line);
  ((ss >> out), ...);
  if (ss.fail()) throw ParseError(std::string("malformed ") + what + ": '" + line + "'", lineno);
}

int count_after(const std::string& line, const std::string& keyword, int lineno) {
  std::istringstream ss(line);
  std::string kw;
  long long n = -1;
  ss >> kw >> n;
  if (kw != keyword || ss.fail() || n < 0) {
    throw ParseError("expected '" + keyword + " <count>', got '" + line + "'", lineno);
  }
  return static_cast<int>(n);
}

// Reads the next line before taking its number; argument evaluation order
// would otherwise be unspecified.
template <typename... T>
void scan_next(LineReader& r, const char* expect, const char* what, T&... out) {
  const std::string line = r.require(expect);
  scan(line, r.line(), what, out...);
}

int count_next(LineReader& r, const std::string& keyword) {
  const std::string line = r.require(keyword.c_str());
  return count_after(line, keyword, r.line());
}

}  // namespace

Mesh read_native_mesh(std::istream& in) {
  LineReader r(in);
  {
    std::string header = r.require("header");
    std::istringstream ss(header);
    std::string magic;
    int version = 0;
    ss >> magic >> version;
    if (magic != "lipfrac-mesh" || version != 1) {
      throw ParseError("expected header 'lipfrac-mesh 1'", r.line());
    }
  }

  const int nn = count_next(r, "nodes");
  std::vector<Point> nodes(nn);
  for (int i = 0; i < nn; ++i) {
    double x, y;
    scan_next(r, "node coordinates", "node", x, y);
    nodes[i] = {x, y};
  }

  const int nt = count_next(r, "triangles");
  std::vector<Triangle> tris(nt);
  for (int e = 0; e < nt; ++e) {
    int a, b, c;
    scan_next(r, "triangle", "triangle", a, b, c);
    tris[e] = {a, b, c};
  }

  std::vector<BoundaryFacet> facets;
  std::string line;
  if (r.next(line)) {
    const int nf = count_after(line, "facets", r.line());
    facets.resize(nf);
    for (int f = 0; f < nf; ++f) {
      int a, b;
      std::string tag;
      scan_next(r, "facet", "facet", a, b, tag);
      facets[f] = {{a, b}, tag};
    }
    if (r.next(line)) throw ParseError("trailing content after facets block", r.line());
  }
  return Mesh(std::move(nodes), std::move(tris), std::move(facets));
}

Mesh read_msh2_mesh(std::istream& in, const PhysicalTagMap& physical_tags) {
  LineReader r(in);
  std::map<int, std::string> names;
  std::unordered_map<long long, int> node_index;
  std::vector<Point> nodes;
  std::vector<Triangle> tris;
  std::vector<std::pair<std::array<long long, 2>, int>> lines;
  bool have_nodes = false, have_elements = false;

  std::string line;
  while (r.next(line)) {
    if (line.rfind("$MeshFormat", 0) == 0) {
      std::string fmt = r.require("format line");
      double version = 0;
      int filetype = -1;
      scan(fmt, r.line(), "$MeshFormat", version, filetype);
      if (version < 2.0 || version >= 3.0) throw ParseError("only MSH 2.x is supported", r.line());
      if (filetype != 0) throw ParseError("binary MSH files are not supported", r.line());
      if (r.require("$EndMeshFormat") != "$EndMeshFormat") throw ParseError("expected $EndMeshFormat", r.line());
    } else if (line.rfind("$PhysicalNames", 0) == 0) {
      int n;
      scan_next(r, "count", "$PhysicalNames count", n);
      for (int i = 0; i < n; ++i) {
        std::string l = r.require("physical name");
        std::istringstream ss(l);
        int dim, tag;
        ss >> dim >> tag;
        std::string name;
        ss >> std::quoted(name);
        if (ss.fail()) throw ParseError("malformed physical name: '" + l + "'", r.line());
        names[tag] = name;
      }
      if (r.require("$EndPhysicalNames") != "$EndPhysicalNames") throw ParseError("expected $EndPhysicalNames", r.line());
    } else if (line.rfind("$Nodes", 0) == 0) {
      int n;
      scan_next(r, "count", "$Nodes count", n);
      nodes.reserve(n);
      for (int i = 0; i < n; ++i) {
        long long id;
        double x, y, z;
        scan_next(r, "node", "node", id, x, y, z);
        node_index[id] = static_cast<int>(nodes.size());
        nodes.emplace_back(x, y);
      }
      if (r.require("$EndNodes") != "$EndNodes") throw ParseError("expected $EndNodes", r.line());
      have_nodes = true;
    } else if (line.rfind("$Elements", 0) == 0) {
      int n;
      scan_next(r, "count", "$Elements count", n);
      for (int i = 0; i < n; ++i) {
        std::string l = r.require("element");
        const int lno = r.line();
        std::istringstream ss(l);
        long long id;
        int type, ntags;
        ss >> id >> type >> ntags;
        if (ss.fail() || ntags < 0) throw ParseError("malformed element: '" + l + "'", lno);
        std::vector<int> tags(ntags);
        for (auto& t : tags) ss >> t;
        const int nv = type == 1 ? 2 : type == 2 ? 3 : type == 15 ? 1 : -1;
        if (nv < 0) {
          throw ParseError("unsupported element type " + std::to_string(type) +
                               " (only 2-node lines, 3-node triangles and points)", lno);
        }
        std::vector<long long> v(nv);
        for (auto& x : v) ss >> x;
        if (ss.fail()) throw ParseError("malformed element: '" + l + "'", lno);
        if (type == 15) continue;
        if (type == 2) {
          tris.push_back({static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2])});
          // Node ids are resolved after the loop; stash raw ids for now.
        } else {
          lines.push_back({{v[0], v[1]}, ntags > 0 ? tags[0] : 0});
        }
      }
      if (r.require("$EndElements") != "$EndElements") throw ParseError("expected $EndElements", r.line());
      have_elements = true;
    }
    // Unknown sections ($Periodic, $NodeData, ...) are skipped line by line.
  }
  if (!have_nodes) throw ParseError("missing $Nodes section", r.line());
  if (!have_elements) throw ParseError("missing $Elements section", r.line());

  auto resolve = [&](long long id) {
    auto it = node_index.find(id);
    if (it == node_index.end()) throw ValidationError("element references unknown node id " + std::to_string(id));
    return it->second;
  };
  for (auto& t : tris)
    for (int& v : t) v = resolve(v);

  std::vector<BoundaryFacet> facets;
  facets.reserve(lines.size());
  for (const auto& [ids, phys] : lines) {
    std::string tag;
    if (auto it = physical_tags.find(phys); it != physical_tags.end()) {
      tag = it->second;
    } else if (auto jt = names.find(phys); jt != names.end()) {
      tag = jt->second;
    } else {
      tag = std::to_string(phys);
    }
    facets.push_back({{resolve(ids[0]), resolve(ids[1])}, tag});
  }
  return Mesh(std::move(nodes), std::move(tris), std::move(facets));
}

Mesh load_mesh(const std::filesystem::path& path, MeshFormat format,
               const PhysicalTagMap& physical_tags) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mesh file '" + path.string() + "'");
  return format == MeshFormat::msh_ascii_v2 ? read_msh2_mesh(in, physical_tags) : read_native_mesh(in);
}

void write_native_mesh(const Mesh& mesh, std::ostream& out) {
  out << "lipfrac-mesh 1\n";
  out << "nodes " << mesh.num_nodes() << '\n';
  out << std::setprecision(17);
  for (const auto& p : mesh.nodes()) out << p.x() << ' ' << p.y() << '\n';
  out << "triangles " << mesh.num_elements() << '\n';
  for (const auto& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "facets " << mesh.facets().size() << '\n';
  for (const auto& f : mesh.facets()) out << f.nodes[0] << ' ' << f.nodes[1] << ' ' << f.tag << '\n';
}

void write_native_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write mesh file '" + path.string() + "'");
  write_native_mesh(mesh, out);
}

}  // namespace lipfrac
