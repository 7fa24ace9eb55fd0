#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <span>
#include <string>

#include "json.hpp"

#include "lipfrac/config.hpp"
#include "lipfrac/fem.hpp"
#include "lipfrac/mesh.hpp"

namespace lipfrac {

inline constexpr const char* kTimeSeriesHeader = "t,E_kin,E_p,E_d,W_ext,a,v_tip_over_cR";

struct TimeSeriesRow {
  double t = 0, E_kin = 0, E_p = 0, E_d = 0, W_ext = 0, a = 0, v_tip_over_cR = 0;
};

/// Fields of one snapshot. Point vectors are interleaved (x, y) per node.
struct SnapshotFields {
  const Vector& u;
  const Vector& v;
  const Vector& d;
  std::span<const double> e_plus;
  std::span<const double> hydrostatic;  ///< tr(sigma)/2 per element
};

/// Legacy ASCII VTK 3.0 unstructured grid of triangles (cell type 5).
void write_vtk(std::ostream& out, const Mesh& mesh, const SnapshotFields& fields,
               const std::string& title = "lipfrac");
/// Writes to a temporary sibling and renames it into place.
void write_vtk_file(const std::filesystem::path& path, const Mesh& mesh, const SnapshotFields& fields,
                    const std::string& title = "lipfrac");

/// %.17g: round-trips through strtod.
std::string format_double(double x);
std::string format_row(const TimeSeriesRow& row);

/// Appends rows to a CSV file, flushing after each so partial runs leave a
/// readable file.
class TimeSeriesWriter {
 public:
  explicit TimeSeriesWriter(const std::filesystem::path& path);
  void write(const TimeSeriesRow& row);

 private:
  std::ofstream out_;
};

nlohmann::json config_to_json(const SimulationConfig& cfg);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& value);

}  // namespace lipfrac
