#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lipfrac/constitutive.hpp"
#include "lipfrac/dynamics.hpp"
#include "lipfrac/lip_damage.hpp"
#include "lipfrac/mesh.hpp"
#include "lipfrac/postproc.hpp"

namespace lipfrac {

/// Flat `key = value` text grouped in `[section]` headers. `#` and `;` start
/// comments. Section and key order is preserved.
class IniDocument {
 public:
  struct Entry {
    std::string value;
    int line;
  };
  struct Section {
    std::string name;
    int line;
    std::vector<std::pair<std::string, Entry>> entries;
    const Entry* find(const std::string& key) const;
  };

  static IniDocument parse(std::istream& in);
  const std::vector<Section>& sections() const { return sections_; }
  const Section* find(const std::string& name) const;

 private:
  std::vector<Section> sections_;
};

struct PostprocConfig {
  CrackLengthMode mode = CrackLengthMode::single;
  double d_thresh = 0.95;
  std::optional<Point> notch_tip;
  Eigen::Vector2d crack_direction{1, 0};
  std::optional<double> mirror_offset;
  std::optional<Rect> region1;
  std::optional<Rect> region2;
};

struct SimulationConfig {
  std::filesystem::path mesh_path;
  MeshFormat mesh_format = MeshFormat::native_text;
  PhysicalTagMap physical_tags;

  double E = 0, nu = 0, rho = 0, l = 0;
  std::optional<double> Yc;
  std::optional<double> Gc;

  double cfl_factor = 0.35;
  double t_end = 0;
  bool stability_check = true;

  std::vector<BoundaryCondition> bcs;

  std::filesystem::path output_dir = "output";
  int output_every = 1;
  bool write_vtk = true;

  DamageSolverOptions solver;
  PostprocConfig postproc;

  /// Material with Yc derived from Gc when only Gc is given.
  MaterialParams material() const;
  /// Checks the invariants (exactly one of Yc/Gc, positive tolerances, ...).
  void validate() const;
};

/// Relative paths are resolved against `base_dir`.
SimulationConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
SimulationConfig load_config(const std::filesystem::path& path);

}  // namespace lipfrac
