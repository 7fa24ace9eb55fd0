#include "lipfrac/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "lipfrac/error.hpp"

namespace lipfrac {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& s) {
  const auto pos = s.find_first_of("#;");
  return pos == std::string::npos ? s : s.substr(0, pos);
}

}  // namespace

const IniDocument::Entry* IniDocument::Section::find(const std::string& key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return &v;
  return nullptr;
}

const IniDocument::Section* IniDocument::find(const std::string& name) const {
  for (const auto& s : sections_)
    if (s.name == name) return &s;
  return nullptr;
}

IniDocument IniDocument::parse(std::istream& in) {
  IniDocument doc;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("unterminated section header", lineno);
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) throw ParseError("empty section name", lineno);
      if (doc.find(name)) throw ParseError("duplicate section [" + name + "]", lineno);
      doc.sections_.push_back({name, lineno, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno);
    if (doc.sections_.empty()) throw ParseError("key outside of any section", lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", lineno);
    auto& section = doc.sections_.back();
    if (section.find(key)) throw ParseError("duplicate key '" + key + "'", lineno);
    section.entries.push_back({key, {value, lineno}});
  }
  return doc;
}

// ---------------------------------------------------------------------------

namespace {

class SectionReader {
 public:
  SectionReader(const IniDocument::Section& s) : s_(s) {}

  std::optional<std::string> text(const std::string& key) {
    used_.push_back(key);
    if (auto* e = s_.find(key)) return e->value;
    return std::nullopt;
  }

  std::string required_text(const std::string& key) {
    auto v = text(key);
    if (!v) throw ConfigError("[" + s_.name + "] missing required key '" + key + "'");
    return *v;
  }

  std::optional<double> number(const std::string& key) {
    auto v = text(key);
    if (!v) return std::nullopt;
    return to_number(key, *v);
  }

  double required_number(const std::string& key) { return to_number(key, required_text(key)); }

  std::optional<bool> flag(const std::string& key) {
    auto v = text(key);
    if (!v) return std::nullopt;
    std::string s = *v;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
    if (s == "false" || s == "no" || s == "0" || s == "off") return false;
    throw error(key, "expected a boolean, got '" + *v + "'");
  }

  std::optional<std::vector<double>> numbers(const std::string& key, std::size_t count) {
    auto v = text(key);
    if (!v) return std::nullopt;
    std::istringstream ss(*v);
    std::vector<double> out;
    double x;
    while (ss >> x) out.push_back(x);
    if (!ss.eof() || out.size() != count) {
      throw error(key, "expected " + std::to_string(count) + " numbers, got '" + *v + "'");
    }
    return out;
  }

  /// Every key present must have been read; catches typos.
  void finish(const std::vector<std::string>& prefixes = {}) const {
    for (const auto& [k, e] : s_.entries) {
      if (std::find(used_.begin(), used_.end(), k) != used_.end()) continue;
      bool prefixed = false;
      for (const auto& p : prefixes) prefixed |= k.rfind(p, 0) == 0;
      if (!prefixed) throw ConfigError("[" + s_.name + "] line " + std::to_string(e.line) + ": unknown key '" + k + "'");
    }
  }

  ConfigError error(const std::string& key, const std::string& what) const {
    const auto* e = s_.find(key);
    return ConfigError("[" + s_.name + "] line " + std::to_string(e ? e->line : s_.line) + ": " + key + ": " + what);
  }

 private:
  double to_number(const std::string& key, const std::string& v) const {
    std::size_t pos = 0;
    double x = 0;
    try {
      x = std::stod(v, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || trim(v.substr(pos)).size() != 0) throw error(key, "expected a number, got '" + v + "'");
    return x;
  }

  const IniDocument::Section& s_;
  std::vector<std::string> used_;
};

Rect to_rect(const std::vector<double>& v) { return {v[0], v[1], v[2], v[3]}; }

}  // namespace

MaterialParams SimulationConfig::material() const {
  const double yc = Yc ? *Yc : yc_from_gc(Gc.value_or(0), l);
  return MaterialParams::create(E, nu, rho, yc, l);
}

void SimulationConfig::validate() const {
  if (Yc.has_value() == Gc.has_value()) throw ConfigError("[material] give exactly one of Yc and Gc");
  (void)material();
  if (!(cfl_factor > 0 && cfl_factor < 1)) throw ConfigError("[time] cfl_factor must lie in (0,1)");
  if (!(t_end >= 0)) throw ConfigError("[time] t_end must be non-negative");
  if (output_every < 1) throw ConfigError("[output] every must be >= 1");
  if (!(solver.kkt_tol > 0 && solver.gap_tol > 0 && solver.local_tol > 0) || solver.max_iter < 1) {
    throw ConfigError("[solver] tolerances and max_iter must be positive");
  }
  if (!(postproc.d_thresh > 0 && postproc.d_thresh < 1)) throw ConfigError("[postproc] d_thresh must lie in (0,1)");
  if (postproc.mode == CrackLengthMode::symmetric_branching && !postproc.notch_tip) {
    throw ConfigError("[postproc] symmetric_branching needs notch_tip");
  }
}

SimulationConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  const IniDocument doc = IniDocument::parse(in);
  SimulationConfig cfg;

  static const std::vector<std::string> known = {"mesh", "material", "time", "output", "solver", "postproc"};
  for (const auto& s : doc.sections()) {
    if (s.name.rfind("bc.", 0) == 0) continue;
    if (std::find(known.begin(), known.end(), s.name) == known.end()) {
      throw ConfigError("line " + std::to_string(s.line) + ": unknown section [" + s.name + "]");
    }
  }

  const auto* mesh = doc.find("mesh");
  if (!mesh) throw ConfigError("missing [mesh] section");
  {
    SectionReader r(*mesh);
    std::filesystem::path p = r.required_text("path");
    cfg.mesh_path = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
    if (auto f = r.text("format")) {
      try {
        cfg.mesh_format = parse_mesh_format(*f);
      } catch (const ArgumentError& e) {
        throw r.error("format", e.what());
      }
    } else {
      cfg.mesh_format = mesh_format_from_path(cfg.mesh_path);
    }
    for (const auto& [k, e] : mesh->entries) {
      if (k.rfind("physical.", 0) != 0) continue;
      try {
        cfg.physical_tags[std::stoi(k.substr(9))] = e.value;
      } catch (const std::exception&) {
        throw r.error(k, "expected physical.<integer>");
      }
    }
    r.finish({"physical."});
  }

  const auto* mat = doc.find("material");
  if (!mat) throw ConfigError("missing [material] section");
  {
    SectionReader r(*mat);
    cfg.E = r.required_number("E");
    cfg.nu = r.required_number("nu");
    cfg.rho = r.required_number("rho");
    cfg.l = r.required_number("l");
    cfg.Yc = r.number("Yc");
    cfg.Gc = r.number("Gc");
    r.finish();
  }

  const auto* time = doc.find("time");
  if (!time) throw ConfigError("missing [time] section");
  {
    SectionReader r(*time);
    cfg.t_end = r.required_number("t_end");
    cfg.cfl_factor = r.number("cfl_factor").value_or(cfg.cfl_factor);
    cfg.stability_check = r.flag("stability_check").value_or(true);
    r.finish();
  }

  for (const auto& s : doc.sections()) {
    if (s.name.rfind("bc.", 0) != 0) continue;
    SectionReader r(s);
    BoundaryCondition bc;
    const std::string kind = r.required_text("kind");
    if (kind == "displacement") bc.kind = BcKind::displacement;
    else if (kind == "velocity") bc.kind = BcKind::velocity;
    else if (kind == "traction") bc.kind = BcKind::traction;
    else throw r.error("kind", "expected displacement|velocity|traction");
    const std::string comp = r.required_text("component");
    if (comp == "x") bc.component = 0;
    else if (comp == "y") bc.component = 1;
    else throw r.error("component", "expected x or y");
    bc.value = r.number("value").value_or(0.0);
    bc.tag = r.text("tag").value_or("");
    if (auto b = r.numbers("box", 4)) bc.box = std::array<double, 4>{(*b)[0], (*b)[1], (*b)[2], (*b)[3]};
    if (bc.tag.empty() && !bc.box) throw ConfigError("[" + s.name + "] needs a tag or a box selector");
    const std::string profile = r.text("profile").value_or("constant");
    if (profile == "constant") {
      bc.profile.shape = TimeProfile::Shape::constant;
    } else if (profile == "ramp") {
      bc.profile.shape = TimeProfile::Shape::ramp;
      bc.profile.rise_time = r.required_number("rise_time");
      if (!(bc.profile.rise_time > 0)) throw r.error("rise_time", "must be positive");
    } else {
      throw r.error("profile", "expected constant or ramp");
    }
    r.finish();
    cfg.bcs.push_back(bc);
  }

  if (const auto* out = doc.find("output")) {
    SectionReader r(*out);
    if (auto d = r.text("directory")) {
      std::filesystem::path p = *d;
      cfg.output_dir = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
    } else if (!base_dir.empty()) {
      cfg.output_dir = base_dir / cfg.output_dir;
    }
    if (auto k = r.number("every")) cfg.output_every = static_cast<int>(*k);
    cfg.write_vtk = r.flag("vtk").value_or(true);
    r.finish();
  } else if (!base_dir.empty()) {
    cfg.output_dir = base_dir / cfg.output_dir;
  }

  if (const auto* sol = doc.find("solver")) {
    SectionReader r(*sol);
    cfg.solver.kkt_tol = r.number("kkt_tol").value_or(cfg.solver.kkt_tol);
    cfg.solver.gap_tol = r.number("gap_tol").value_or(cfg.solver.gap_tol);
    cfg.solver.local_tol = r.number("local_tol").value_or(cfg.solver.local_tol);
    cfg.solver.max_iter = static_cast<int>(r.number("max_iter").value_or(cfg.solver.max_iter));
    r.finish();
  }

  if (const auto* pp = doc.find("postproc")) {
    SectionReader r(*pp);
    const std::string mode = r.text("mode").value_or("single");
    if (mode == "single") cfg.postproc.mode = CrackLengthMode::single;
    else if (mode == "symmetric_branching") cfg.postproc.mode = CrackLengthMode::symmetric_branching;
    else throw r.error("mode", "expected single or symmetric_branching");
    cfg.postproc.d_thresh = r.number("d_thresh").value_or(cfg.postproc.d_thresh);
    if (auto v = r.numbers("notch_tip", 2)) cfg.postproc.notch_tip = Point((*v)[0], (*v)[1]);
    if (auto v = r.numbers("crack_direction", 2)) cfg.postproc.crack_direction = {(*v)[0], (*v)[1]};
    cfg.postproc.mirror_offset = r.number("mirror_offset");
    if (auto v = r.numbers("D1", 4)) cfg.postproc.region1 = to_rect(*v);
    if (auto v = r.numbers("D2", 4)) cfg.postproc.region2 = to_rect(*v);
    r.finish();
  }

  cfg.validate();
  return cfg;
}

SimulationConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config(in, path.parent_path());
}

}  // namespace lipfrac
