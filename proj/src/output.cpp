#include "lipfrac/output.hpp"

#include <cstdio>
#include <functional>
#include <ostream>

#include "lipfrac/error.hpp"

namespace lipfrac {

namespace {

void write_atomically(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    body(out);
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string num(double x) { return format_double(x); }

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_vtk(std::ostream& out, const Mesh& mesh, const SnapshotFields& f, const std::string& title) {
  const int nn = mesh.num_nodes();
  const int ne = mesh.num_elements();
  if (f.u.size() != 2 * nn || f.v.size() != 2 * nn) throw ArgumentError("write_vtk: point field size mismatch");
  if (f.d.size() != ne || static_cast<int>(f.e_plus.size()) != ne ||
      static_cast<int>(f.hydrostatic.size()) != ne) {
    throw ArgumentError("write_vtk: cell field size mismatch");
  }

  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nn << " double\n";
  for (const auto& p : mesh.nodes()) out << num(p.x()) << ' ' << num(p.y()) << " 0\n";
  out << "CELLS " << ne << ' ' << 4 * ne << '\n';
  for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << ne << '\n';
  for (int e = 0; e < ne; ++e) out << "5\n";

  out << "POINT_DATA " << nn << '\n';
  for (const auto& [name, vec] : {std::pair<const char*, const Vector*>{"u", &f.u}, {"v", &f.v}}) {
    out << "VECTORS " << name << " double\n";
    for (int i = 0; i < nn; ++i) out << num((*vec)[2 * i]) << ' ' << num((*vec)[2 * i + 1]) << " 0\n";
  }

  out << "CELL_DATA " << ne << '\n';
  auto scalar = [&](const char* name, auto&& value) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int e = 0; e < ne; ++e) out << num(value(e)) << '\n';
  };
  scalar("d", [&](int e) { return f.d[e]; });
  scalar("e_plus", [&](int e) { return f.e_plus[e]; });
  scalar("hydrostatic_stress", [&](int e) { return f.hydrostatic[e]; });
}

void write_vtk_file(const std::filesystem::path& path, const Mesh& mesh, const SnapshotFields& fields,
                    const std::string& title) {
  write_atomically(path, [&](std::ostream& out) { write_vtk(out, mesh, fields, title); });
}

std::string format_row(const TimeSeriesRow& r) {
  return num(r.t) + ',' + num(r.E_kin) + ',' + num(r.E_p) + ',' + num(r.E_d) + ',' + num(r.W_ext) + ',' +
         num(r.a) + ',' + num(r.v_tip_over_cR);
}

TimeSeriesWriter::TimeSeriesWriter(const std::filesystem::path& path) : out_(path) {
  if (!out_) throw Error("cannot open '" + path.string() + "' for writing");
  out_ << kTimeSeriesHeader << '\n';
  out_.flush();
}

void TimeSeriesWriter::write(const TimeSeriesRow& row) {
  out_ << format_row(row) << '\n';
  out_.flush();
}

nlohmann::json config_to_json(const SimulationConfig& c) {
  using nlohmann::json;
  json j;
  j["mesh"] = {{"path", c.mesh_path.string()},
               {"format", c.mesh_format == MeshFormat::msh_ascii_v2 ? "msh" : "native"}};
  json tags = json::object();
  for (const auto& [id, name] : c.physical_tags) tags[std::to_string(id)] = name;
  j["mesh"]["physical"] = tags;

  j["material"] = {{"E", c.E}, {"nu", c.nu}, {"rho", c.rho}, {"l", c.l}};
  if (c.Yc) j["material"]["Yc"] = *c.Yc;
  if (c.Gc) j["material"]["Gc"] = *c.Gc;

  j["time"] = {{"cfl_factor", c.cfl_factor}, {"t_end", c.t_end}, {"stability_check", c.stability_check}};

  json bcs = json::array();
  for (const auto& bc : c.bcs) {
    static const char* kinds[] = {"displacement", "velocity", "traction"};
    json b = {{"kind", kinds[static_cast<int>(bc.kind)]},
              {"component", bc.component == 0 ? "x" : "y"},
              {"value", bc.value},
              {"profile", bc.profile.shape == TimeProfile::Shape::ramp ? "ramp" : "constant"}};
    if (bc.profile.shape == TimeProfile::Shape::ramp) b["rise_time"] = bc.profile.rise_time;
    if (!bc.tag.empty()) b["tag"] = bc.tag;
    if (bc.box) b["box"] = *bc.box;
    bcs.push_back(b);
  }
  j["bc"] = bcs;

  j["output"] = {{"directory", c.output_dir.string()}, {"every", c.output_every}, {"vtk", c.write_vtk}};
  j["solver"] = {{"kkt_tol", c.solver.kkt_tol},
                 {"gap_tol", c.solver.gap_tol},
                 {"local_tol", c.solver.local_tol},
                 {"max_iter", c.solver.max_iter}};

  const auto& pp = c.postproc;
  json p = {{"mode", pp.mode == CrackLengthMode::single ? "single" : "symmetric_branching"},
            {"d_thresh", pp.d_thresh},
            {"crack_direction", {pp.crack_direction.x(), pp.crack_direction.y()}}};
  if (pp.notch_tip) p["notch_tip"] = {pp.notch_tip->x(), pp.notch_tip->y()};
  if (pp.mirror_offset) p["mirror_offset"] = *pp.mirror_offset;
  auto rect = [](const Rect& r) { return json::array({r.xmin, r.ymin, r.xmax, r.ymax}); };
  if (pp.region1) p["D1"] = rect(*pp.region1);
  if (pp.region2) p["D2"] = rect(*pp.region2);
  j["postproc"] = p;
  return j;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& value) {
  write_atomically(path, [&](std::ostream& out) { out << value.dump(2) << '\n'; });
}

}  // namespace lipfrac
