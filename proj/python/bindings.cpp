#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "lipfrac/config.hpp"
#include "lipfrac/constitutive.hpp"
#include "lipfrac/driver.hpp"
#include "lipfrac/error.hpp"
#include "lipfrac/lip_damage.hpp"
#include "lipfrac/lipmesh.hpp"
#include "lipfrac/mesh.hpp"
#include "lipfrac/mesh_builders.hpp"

namespace py = pybind11;
using namespace lipfrac;

namespace {

using RowPoints = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;
using RowTriangles = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;

RowPoints points_matrix(const std::vector<Point>& pts) {
  RowPoints m(pts.size(), 2);
  for (std::size_t i = 0; i < pts.size(); ++i) m.row(i) = pts[i].transpose();
  return m;
}

Mesh mesh_from_arrays(const RowPoints& nodes, const RowTriangles& tris) {
  std::vector<Point> p(nodes.rows());
  for (Eigen::Index i = 0; i < nodes.rows(); ++i) p[i] = nodes.row(i).transpose();
  std::vector<Triangle> t(tris.rows());
  for (Eigen::Index i = 0; i < tris.rows(); ++i) t[i] = {tris(i, 0), tris(i, 1), tris(i, 2)};
  return Mesh(std::move(p), std::move(t), {});
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

py::dict series_dict(const std::vector<TimeSeriesRow>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::VectorXd t(n), ek(n), ep(n), ed(n), w(n), a(n), v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[i];
    t[i] = r.t, ek[i] = r.E_kin, ep[i] = r.E_p, ed[i] = r.E_d, w[i] = r.W_ext, a[i] = r.a, v[i] = r.v_tip_over_cR;
  }
  py::dict d;
  d["t"] = t, d["E_kin"] = ek, d["E_p"] = ep, d["E_d"] = ed, d["W_ext"] = w, d["a"] = a, d["v_tip_over_cR"] = v;
  return d;
}

}  // namespace

PYBIND11_MODULE(_lipfrac, m) {
  m.doc() = "Explicit dynamic fracture with Lipschitz-constrained damage";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<SolverError>(m, "SolverError", base.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());

  // Material

  py::class_<MaterialParams>(m, "Material")
      .def(py::init(&MaterialParams::create), py::arg("E"), py::arg("nu"), py::arg("rho"), py::arg("Yc"),
           py::arg("l"))
      .def_readonly("E", &MaterialParams::E)
      .def_readonly("nu", &MaterialParams::nu)
      .def_readonly("rho", &MaterialParams::rho)
      .def_readonly("Yc", &MaterialParams::Yc)
      .def_readonly("l", &MaterialParams::l)
      .def_readonly("lame_lambda", &MaterialParams::lambda)
      .def_readonly("mu", &MaterialParams::mu);

  py::class_<WaveSpeeds>(m, "WaveSpeeds")
      .def_readonly("c_d", &WaveSpeeds::c_d)
      .def_readonly("c_s", &WaveSpeeds::c_s)
      .def_readonly("c_R", &WaveSpeeds::c_R);

  m.def("wave_speeds", py::overload_cast<const MaterialParams&>(&wave_speeds), py::arg("material"));
  m.def("yc_from_gc", &yc_from_gc, py::arg("Gc"), py::arg("l"));
  m.def("degradation", &degradation, py::arg("d"));
  m.def("softening", &softening, py::arg("d"));
  m.def("local_damage_solve", &local_damage_solve, py::arg("e_plus"), py::arg("d_n"), py::arg("Yc"),
        py::arg("tol") = 1e-12);

  // Mesh and lip-mesh

  py::class_<Mesh>(m, "Mesh")
      .def(py::init(&mesh_from_arrays), py::arg("nodes"), py::arg("triangles"),
           "Mesh from an (n, 2) node array and an (m, 3) triangle array, without facet tags.")
      .def_property_readonly("num_nodes", &Mesh::num_nodes)
      .def_property_readonly("num_elements", &Mesh::num_elements)
      .def_property_readonly("nodes", [](const Mesh& self) { return points_matrix(self.nodes()); })
      .def_property_readonly("triangles",
                             [](const Mesh& self) {
                               RowTriangles t(self.num_elements(), 3);
                               for (int e = 0; e < self.num_elements(); ++e)
                                 for (int k = 0; k < 3; ++k) t(e, k) = self.triangle(e)[k];
                               return t;
                             })
      .def_property_readonly("areas",
                             [](const Mesh& self) {
                               return Eigen::Map<const Eigen::VectorXd>(self.areas().data(), self.num_elements())
                                   .eval();
                             })
      .def_property_readonly("centroids",
                             [](const Mesh& self) {
                               RowPoints c(self.num_elements(), 2);
                               for (int e = 0; e < self.num_elements(); ++e) c.row(e) = self.centroid(e).transpose();
                               return c;
                             })
      .def("tags", &Mesh::tags)
      .def("nodes_with_tag", &Mesh::nodes_with_tag, py::arg("tag"))
      .def("__repr__", [](const Mesh& self) {
        return "<Mesh " + std::to_string(self.num_nodes()) + " nodes, " + std::to_string(self.num_elements()) +
               " triangles>";
      });

  m.def("rectangle_mesh", &rectangle_mesh, py::arg("width"), py::arg("height"), py::arg("nx"), py::arg("ny"));
  m.def("notched_tension_half_mesh", &notched_tension_half_mesh, py::arg("h"));
  m.def("kalthoff_half_mesh", &kalthoff_half_mesh, py::arg("h"));
  m.def(
      "load_mesh",
      [](const std::filesystem::path& path, const std::string& format) {
        return load_mesh(path, format.empty() ? mesh_format_from_path(path) : parse_mesh_format(format));
      },
      py::arg("path"), py::arg("format") = "");
  m.def("min_element_size", &min_element_size, py::arg("mesh"));

  py::class_<LipMesh>(m, "LipMesh")
      .def_property_readonly("num_vertices", &LipMesh::num_vertices)
      .def_property_readonly("num_edges", &LipMesh::num_edges)
      .def_property_readonly("vertices", [](const LipMesh& self) { return points_matrix(self.vertices()); })
      .def_property_readonly("edges", [](const LipMesh& self) {
        py::list out;
        for (const auto& e : self.edges()) out.append(py::make_tuple(e.a, e.b, e.length));
        return out;
      });
  m.def("build_lipmesh", &build_lipmesh, py::arg("mesh"));

  // Damage

  py::class_<DamageSolverOptions>(m, "DamageSolverOptions")
      .def(py::init<>())
      .def_readwrite("kkt_tol", &DamageSolverOptions::kkt_tol)
      .def_readwrite("gap_tol", &DamageSolverOptions::gap_tol)
      .def_readwrite("local_tol", &DamageSolverOptions::local_tol)
      .def_readwrite("max_iter", &DamageSolverOptions::max_iter);

  m.def(
      "compute_bounds",
      [](const LipMesh& lip, const Eigen::VectorXd& d_loc, double l) {
        const auto b = compute_bounds(lip, d_loc, l);
        return py::make_tuple(b.lower, b.upper);
      },
      py::arg("lipmesh"), py::arg("d_loc"), py::arg("l"), "Returns (lower, upper).");

  m.def(
      "damage_update",
      [](const LipMesh& lip, const Eigen::VectorXd& e_plus, const Eigen::VectorXd& areas,
         const Eigen::VectorXd& d_previous, const MaterialParams& p, const DamageSolverOptions& options) {
        DamageUpdateStats stats;
        const auto st = damage_update(lip, to_vector(e_plus), to_vector(areas), d_previous, p, options, &stats);
        py::dict out;
        out["d"] = st.d, out["d_loc"] = st.d_loc, out["d_lower"] = st.d_lower, out["d_upper"] = st.d_upper;
        out["regions"] = stats.regions;
        out["region_elements"] = stats.region_elements;
        return out;
      },
      py::arg("lipmesh"), py::arg("e_plus"), py::arg("areas"), py::arg("d_previous"), py::arg("material"),
      py::arg("options") = DamageSolverOptions{});

  m.def(
      "solve_damage_whole_domain",
      [](const LipMesh& lip, const Eigen::VectorXd& e_plus, const Eigen::VectorXd& areas, const Eigen::VectorXd& d_n,
         const MaterialParams& p, const DamageSolverOptions& options) {
        return solve_damage_whole_domain(lip, to_vector(e_plus), to_vector(areas), d_n, p, options);
      },
      py::arg("lipmesh"), py::arg("e_plus"), py::arg("areas"), py::arg("d_n"), py::arg("material"),
      py::arg("options") = DamageSolverOptions{});

  m.def(
      "damage_objective",
      [](const Eigen::VectorXd& e_plus, const Eigen::VectorXd& areas, const Eigen::VectorXd& d, double Yc) {
        return damage_objective(to_vector(e_plus), to_vector(areas), d, Yc);
      },
      py::arg("e_plus"), py::arg("areas"), py::arg("d"), py::arg("Yc"));
  m.def("max_lipschitz_ratio", &max_lipschitz_ratio, py::arg("lipmesh"), py::arg("d"), py::arg("l"));

  // Simulation

  py::class_<SimulationConfig>(m, "SimulationConfig")
      .def_readwrite("t_end", &SimulationConfig::t_end)
      .def_readwrite("cfl_factor", &SimulationConfig::cfl_factor)
      .def_readwrite("stability_check", &SimulationConfig::stability_check)
      .def_readwrite("output_dir", &SimulationConfig::output_dir)
      .def_readwrite("output_every", &SimulationConfig::output_every)
      .def_readwrite("write_vtk", &SimulationConfig::write_vtk)
      .def_readwrite("mesh_path", &SimulationConfig::mesh_path)
      .def_readwrite("l", &SimulationConfig::l)
      .def("material", &SimulationConfig::material)
      .def("validate", &SimulationConfig::validate);
  m.def("load_config", &load_config, py::arg("path"));
  m.def(
      "parse_config",
      [](const std::string& text, const std::filesystem::path& base_dir) {
        std::istringstream in(text);
        return parse_config(in, base_dir);
      },
      py::arg("text"), py::arg("base_dir") = std::filesystem::path{});

  py::class_<Simulation>(m, "Simulation")
      .def(py::init<SimulationConfig>(), py::arg("config"))
      .def(py::init<SimulationConfig, Mesh>(), py::arg("config"), py::arg("mesh"))
      .def_property_readonly("time", &Simulation::time)
      .def_property_readonly("step_count", &Simulation::step_count)
      .def_property_readonly("dt", [](const Simulation& s) { return s.time_control().dt; })
      .def_property_readonly("material", &Simulation::material)
      .def_property_readonly("mesh", &Simulation::mesh, py::return_value_policy::reference_internal)
      .def_property_readonly("damage", &Simulation::damage)
      .def_property_readonly("displacement", [](const Simulation& s) { return s.kinematics().u; })
      .def_property_readonly("velocity", [](const Simulation& s) { return s.kinematics().v; })
      .def_property_readonly("kinetic_energy", &Simulation::kinetic_energy)
      .def_property_readonly("potential_energy", [](const Simulation& s) { return s.energies().potential; })
      .def_property_readonly("dissipated_energy", [](const Simulation& s) { return s.energies().dissipated; })
      .def_property_readonly("external_work", &Simulation::external_work)
      .def("step", &Simulation::step, py::call_guard<py::gil_scoped_release>())
      .def(
          "run",
          [](Simulation& s, bool write_files) {
            RunSummary r;
            {
              py::gil_scoped_release release;
              RunOptions o;
              o.write_files = write_files;
              r = s.run(o);
            }
            py::dict out;
            out["steps"] = r.steps;
            out["dt"] = r.dt;
            out["wall_time"] = r.wall_time;
            out["t_branch"] = r.t_branch ? py::cast(*r.t_branch) : py::none();
            out["max_lipschitz_ratio"] = r.max_lipschitz_ratio;
            out["vtk_files"] = r.vtk_files;
            out["series"] = series_dict(r.series);
            return out;
          },
          py::arg("write_files") = true);
}
