#pragma once

// Run configuration: a JSON document with nested sections. Every object is
// checked for unknown keys so a misspelled field is an error, not a default.

#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cavdd/core.hpp"
#include "cavdd/interaction_table.hpp"

namespace cavdd::cli {

using json = nlohmann::json;

/// Config problem; the message starts with the offending field path.
class ConfigError : public ValidationError {
 public:
  ConfigError(const std::string& field, const std::string& what) : ValidationError(field + ": " + what) {}
};

struct DipoleSpec {
  Vec3 position;
  std::vector<double> levels;
  bool levels_are_frequencies = false;  // false: energies
  std::vector<std::vector<Vec3>> moments;

  friend bool operator==(const DipoleSpec&, const DipoleSpec&) = default;
};

enum class SweepVariable { Separation, Offset, Frequency };

inline const char* to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::Separation: return "separation";
    case SweepVariable::Offset: return "offset";
    case SweepVariable::Frequency: return "frequency";
  }
  return "?";
}

struct SweepSpec {
  SweepVariable variable = SweepVariable::Separation;
  std::size_t axis = 0;
  double from = 0.0;
  double to = 0.0;
  int samples = 2;

  double value(int i) const {
    if (i == samples - 1) return to;
    return from + (to - from) * static_cast<double>(i) / static_cast<double>(samples - 1);
  }

  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

struct OutputSpec {
  std::string path;
  std::vector<std::string> columns;    // empty: all
  std::vector<TermClass> classes;      // empty: all
  bool skip_zero_moments = false;

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct RunConfig {
  std::string description;
  Constants constants;
  std::optional<CavityGeometry> geometry;
  std::array<DipoleSpec, 2> dipoles;
  EwaldSettings ewald;
  std::optional<SweepSpec> sweep;
  OutputSpec output;
  int workers = 0;  // 0: environment or hardware default

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline const std::vector<std::string>& output_columns() {
  static const std::vector<std::string> cols = {
      "sweep_value", "u",         "v",         "a",         "b",        "class",     "status21",
      "status12",    "omega21",   "omega12",   "v21",       "v12",      "vsym",      "v21_image",
      "v21_mode",    "v12_image", "v12_mode",  "tail21",    "tail12",   "v0_free",   "vw21_free",
      "vw12_free",   "wall_warning"};
  return cols;
}

inline std::optional<TermClass> parse_term_class(const std::string& s) {
  for (TermClass c : {TermClass::Permanent, TermClass::PermanentTransition, TermClass::Resonant,
                      TermClass::NonResonant, TermClass::CounterRotating})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

inline void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError(where + "." + it.key(), "unknown key");
  }
}

inline double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(where, "must be finite");
  return v;
}

inline int get_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where, "expected an integer");
  return j.get<int>();
}

inline Vec3 get_vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(where, "expected [x, y, z]");
  return {get_number(j[0], where + "[0]"), get_number(j[1], where + "[1]"), get_number(j[2], where + "[2]")};
}

inline std::size_t get_axis(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where, "expected \"x\", \"y\" or \"z\"");
  const std::string s = j.get<std::string>();
  if (s == "x") return 0;
  if (s == "y") return 1;
  if (s == "z") return 2;
  throw ConfigError(where, "expected \"x\", \"y\" or \"z\", got \"" + s + "\"");
}

inline const char* axis_name(std::size_t a) { return a == 0 ? "x" : (a == 1 ? "y" : "z"); }

inline DipoleSpec parse_dipole(const json& j, const std::string& where) {
  only_keys(j, where, {"position", "energies", "frequencies", "moments"});
  DipoleSpec d;
  if (!j.contains("position")) throw ConfigError(where + ".position", "required");
  d.position = get_vec3(j["position"], where + ".position");
  const bool e = j.contains("energies");
  const bool f = j.contains("frequencies");
  if (e == f) throw ConfigError(where, "give exactly one of \"energies\" or \"frequencies\"");
  d.levels_are_frequencies = f;
  const std::string lk = f ? "frequencies" : "energies";
  const json& levels = j[lk];
  if (!levels.is_array() || levels.empty()) throw ConfigError(where + "." + lk, "expected a non-empty array");
  for (std::size_t i = 0; i < levels.size(); ++i)
    d.levels.push_back(get_number(levels[i], where + "." + lk + "[" + std::to_string(i) + "]"));
  if (!j.contains("moments")) throw ConfigError(where + ".moments", "required");
  const json& m = j["moments"];
  const std::size_t n = d.levels.size();
  if (!m.is_array() || m.size() != n)
    throw ConfigError(where + ".moments", "expected a " + std::to_string(n) + " x " + std::to_string(n) +
                                              " matrix of [x, y, z] vectors");
  for (std::size_t u = 0; u < n; ++u) {
    const std::string row = where + ".moments[" + std::to_string(u) + "]";
    if (!m[u].is_array() || m[u].size() != n)
      throw ConfigError(row, "expected " + std::to_string(n) + " [x, y, z] vectors");
    std::vector<Vec3> r;
    for (std::size_t v = 0; v < n; ++v) r.push_back(get_vec3(m[u][v], row + "[" + std::to_string(v) + "]"));
    d.moments.push_back(std::move(r));
  }
  return d;
}

}  // namespace detail

/// Builds the physical dipole; physics-level problems are reported against `where`.
inline Dipole make_dipole(const DipoleSpec& s, const Constants& k, const std::string& where) {
  try {
    if (s.levels_are_frequencies) return Dipole::from_frequencies(s.position, s.levels, s.moments, k);
    return Dipole(s.position, s.levels, s.moments);
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ConfigError(where, e.what());
  }
}

/// Checks that every sweep sample keeps both dipoles inside the geometry.
inline void validate_sweep_samples(const RunConfig& cfg);

inline void validate(const RunConfig& cfg) {
  try {
    cfg.constants.validate();
  } catch (const ValidationError& e) {
    throw ConfigError("constants", e.what());
  }
  if (cfg.geometry) {
    try {
      cfg.geometry->validate();
    } catch (const ValidationError& e) {
      throw ConfigError("geometry", e.what());
    }
  }
  for (std::size_t i = 0; i < 2; ++i) {
    const std::string where = "dipoles[" + std::to_string(i) + "]";
    make_dipole(cfg.dipoles[i], cfg.constants, where);
    if (cfg.geometry && !cfg.geometry->contains(cfg.dipoles[i].position))
      throw ConfigError(where + ".position", "outside the cavity " + to_string(cfg.dipoles[i].position));
  }
  const auto& e = cfg.ewald;
  if (e.kc && !(*e.kc > 0.0)) throw ConfigError("ewald.kc", "must be positive");
  if (e.image_range && *e.image_range < 0) throw ConfigError("ewald.image_range", "must be >= 0");
  if (e.mode_cutoff && !(*e.mode_cutoff > 0.0)) throw ConfigError("ewald.mode_cutoff", "must be positive");
  if (e.resonance_tol && !(*e.resonance_tol > 0.0)) throw ConfigError("ewald.resonance_tol", "must be positive");
  if (!(e.target_tail > 0.0 && e.target_tail < 1.0)) throw ConfigError("ewald.target_tail", "must lie in (0, 1)");
  if (cfg.sweep) {
    const SweepSpec& s = *cfg.sweep;
    if (s.axis > 2) throw ConfigError("sweep.axis", "must be x, y or z");
    if (!(s.to > s.from)) throw ConfigError("sweep", "range must have positive length (to > from)");
    if (s.samples < 2) throw ConfigError("sweep.samples", "must be >= 2");
    if (s.variable == SweepVariable::Separation && !(s.from > 0.0))
      throw ConfigError("sweep.from", "separation must be positive");
    if (s.variable == SweepVariable::Frequency) {
      const auto& l = cfg.dipoles[0].levels;
      if (!(l.back() - l.front() > 0.0))
        throw ConfigError("sweep.variable", "frequency sweep needs dipole 1 to have a nonzero level spread");
      if (!(s.from > 0.0)) throw ConfigError("sweep.from", "frequency must be positive");
    }
    validate_sweep_samples(cfg);
  }
  if (cfg.workers < 0) throw ConfigError("workers", "must be >= 0");
  for (const auto& c : cfg.output.columns) {
    bool known = false;
    for (const auto& k : output_columns()) known = known || k == c;
    if (!known) throw ConfigError("output.columns", "unknown column \"" + c + "\"");
  }
}

inline RunConfig parse_config(const json& j) {
  using namespace detail;
  only_keys(j, "config", {"description", "constants", "geometry", "dipoles", "ewald", "sweep", "output", "workers"});
  RunConfig cfg;
  if (j.contains("description")) {
    if (!j["description"].is_string()) throw ConfigError("description", "expected a string");
    cfg.description = j["description"].get<std::string>();
  }
  if (j.contains("constants")) {
    const json& c = j["constants"];
    only_keys(c, "constants", {"c", "mu0", "hbar"});
    if (c.contains("c")) cfg.constants.c = get_number(c["c"], "constants.c");
    if (c.contains("mu0")) cfg.constants.mu0 = get_number(c["mu0"], "constants.mu0");
    if (c.contains("hbar")) cfg.constants.hbar = get_number(c["hbar"], "constants.hbar");
  }
  if (j.contains("geometry") && !j["geometry"].is_null()) {
    const json& g = j["geometry"];
    only_keys(g, "geometry", {"Lx", "Ly", "Lz"});
    CavityGeometry geo;
    for (const char* key : {"Lx", "Ly", "Lz"})
      if (!g.contains(key)) throw ConfigError(std::string("geometry.") + key, "required");
    geo.Lx = get_number(g["Lx"], "geometry.Lx");
    geo.Ly = get_number(g["Ly"], "geometry.Ly");
    geo.Lz = get_number(g["Lz"], "geometry.Lz");
    cfg.geometry = geo;
  }
  if (!j.contains("dipoles") || !j["dipoles"].is_array() || j["dipoles"].size() != 2)
    throw ConfigError("dipoles", "expected an array of exactly two dipoles");
  for (std::size_t i = 0; i < 2; ++i)
    cfg.dipoles[i] = parse_dipole(j["dipoles"][i], "dipoles[" + std::to_string(i) + "]");
  if (j.contains("ewald")) {
    const json& e = j["ewald"];
    only_keys(e, "ewald", {"kc", "image_range", "mode_cutoff", "resonance_tol", "target_tail"});
    if (e.contains("kc")) cfg.ewald.kc = get_number(e["kc"], "ewald.kc");
    if (e.contains("image_range")) cfg.ewald.image_range = get_int(e["image_range"], "ewald.image_range");
    if (e.contains("mode_cutoff")) cfg.ewald.mode_cutoff = get_number(e["mode_cutoff"], "ewald.mode_cutoff");
    if (e.contains("resonance_tol"))
      cfg.ewald.resonance_tol = get_number(e["resonance_tol"], "ewald.resonance_tol");
    if (e.contains("target_tail")) cfg.ewald.target_tail = get_number(e["target_tail"], "ewald.target_tail");
  }
  if (j.contains("sweep") && !j["sweep"].is_null()) {
    const json& s = j["sweep"];
    only_keys(s, "sweep", {"variable", "axis", "from", "to", "samples"});
    SweepSpec sw;
    for (const char* key : {"variable", "from", "to", "samples"})
      if (!s.contains(key)) throw ConfigError(std::string("sweep.") + key, "required");
    if (!s["variable"].is_string()) throw ConfigError("sweep.variable", "expected a string");
    const std::string var = s["variable"].get<std::string>();
    if (var == "separation") sw.variable = SweepVariable::Separation;
    else if (var == "offset") sw.variable = SweepVariable::Offset;
    else if (var == "frequency") sw.variable = SweepVariable::Frequency;
    else throw ConfigError("sweep.variable", "expected separation, offset or frequency, got \"" + var + "\"");
    if (s.contains("axis")) sw.axis = get_axis(s["axis"], "sweep.axis");
    sw.from = get_number(s["from"], "sweep.from");
    sw.to = get_number(s["to"], "sweep.to");
    sw.samples = get_int(s["samples"], "sweep.samples");
    cfg.sweep = sw;
  }
  if (j.contains("output")) {
    const json& o = j["output"];
    only_keys(o, "output", {"path", "columns", "classes", "skip_zero_moments"});
    if (o.contains("path")) {
      if (!o["path"].is_string()) throw ConfigError("output.path", "expected a string");
      cfg.output.path = o["path"].get<std::string>();
    }
    if (o.contains("columns")) {
      if (!o["columns"].is_array()) throw ConfigError("output.columns", "expected an array of names");
      for (const auto& c : o["columns"]) {
        if (!c.is_string()) throw ConfigError("output.columns", "expected an array of names");
        cfg.output.columns.push_back(c.get<std::string>());
      }
    }
    if (o.contains("classes")) {
      if (!o["classes"].is_array()) throw ConfigError("output.classes", "expected an array of class names");
      for (const auto& c : o["classes"]) {
        const auto tc = c.is_string() ? parse_term_class(c.get<std::string>()) : std::nullopt;
        if (!tc) throw ConfigError("output.classes", "unknown term class " + c.dump());
        cfg.output.classes.push_back(*tc);
      }
    }
    if (o.contains("skip_zero_moments")) {
      if (!o["skip_zero_moments"].is_boolean()) throw ConfigError("output.skip_zero_moments", "expected a boolean");
      cfg.output.skip_zero_moments = o["skip_zero_moments"].get<bool>();
    }
  }
  if (j.contains("workers")) cfg.workers = get_int(j["workers"], "workers");
  validate(cfg);
  return cfg;
}

inline RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline json to_json(const RunConfig& cfg) {
  auto vec = [](const Vec3& v) { return json::array({v.x, v.y, v.z}); };
  json j;
  j["description"] = cfg.description;
  j["constants"] = {{"c", cfg.constants.c}, {"mu0", cfg.constants.mu0}, {"hbar", cfg.constants.hbar}};
  if (cfg.geometry) j["geometry"] = {{"Lx", cfg.geometry->Lx}, {"Ly", cfg.geometry->Ly}, {"Lz", cfg.geometry->Lz}};
  json ds = json::array();
  for (const auto& d : cfg.dipoles) {
    json m = json::array();
    for (const auto& row : d.moments) {
      json r = json::array();
      for (const auto& v : row) r.push_back(vec(v));
      m.push_back(r);
    }
    ds.push_back({{"position", vec(d.position)}, {d.levels_are_frequencies ? "frequencies" : "energies", d.levels},
                  {"moments", m}});
  }
  j["dipoles"] = ds;
  json e = json::object();
  if (cfg.ewald.kc) e["kc"] = *cfg.ewald.kc;
  if (cfg.ewald.image_range) e["image_range"] = *cfg.ewald.image_range;
  if (cfg.ewald.mode_cutoff) e["mode_cutoff"] = *cfg.ewald.mode_cutoff;
  if (cfg.ewald.resonance_tol) e["resonance_tol"] = *cfg.ewald.resonance_tol;
  e["target_tail"] = cfg.ewald.target_tail;
  j["ewald"] = e;
  if (cfg.sweep) {
    j["sweep"] = {{"variable", to_string(cfg.sweep->variable)},
                  {"axis", detail::axis_name(cfg.sweep->axis)},
                  {"from", cfg.sweep->from},
                  {"to", cfg.sweep->to},
                  {"samples", cfg.sweep->samples}};
  }
  json classes = json::array();
  for (TermClass c : cfg.output.classes) classes.push_back(std::string(to_string(c)));
  j["output"] = {{"path", cfg.output.path},
                 {"columns", cfg.output.columns},
                 {"classes", classes},
                 {"skip_zero_moments", cfg.output.skip_zero_moments}};
  j["workers"] = cfg.workers;
  return j;
}

inline std::string serialize(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

/// FNV-1a 64-bit hash of the canonical serialization. Worker count and the
/// output path do not change the numbers, so they are left out.
inline std::uint64_t config_hash(const RunConfig& cfg) {
  json j = to_json(cfg);
  j.erase("workers");
  j["output"].erase("path");
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hash_string(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Sweep geometry
// ---------------------------------------------------------------------------

/// Dipole positions for sweep sample i. Separation: r2 = r1 + value e_axis.
/// Offset: both dipoles shifted along the axis so that r1[axis] = value.
inline std::pair<Vec3, Vec3> sample_positions(const RunConfig& cfg, int i) {
  Vec3 r1 = cfg.dipoles[0].position;
  Vec3 r2 = cfg.dipoles[1].position;
  if (!cfg.sweep) return {r1, r2};
  const SweepSpec& s = *cfg.sweep;
  const double x = s.value(i);
  switch (s.variable) {
    case SweepVariable::Separation: r2 = r1 + x * axis_vector(s.axis); break;
    case SweepVariable::Offset: {
      const double shift = x - r1[s.axis];
      r1[s.axis] += shift;
      r2[s.axis] += shift;
      break;
    }
    case SweepVariable::Frequency: break;
  }
  return {r1, r2};
}

inline void validate_sweep_samples(const RunConfig& cfg) {
  if (!cfg.sweep || !cfg.geometry) return;
  for (int i = 0; i < cfg.sweep->samples; ++i) {
    const auto [r1, r2] = sample_positions(cfg, i);
    for (const auto& [r, who] : {std::pair{r1, "dipole 1"}, std::pair{r2, "dipole 2"}})
      if (!cfg.geometry->contains(r))
        throw ConfigError("sweep", "sample " + std::to_string(i) + " (value " + std::to_string(cfg.sweep->value(i)) +
                                       ") puts " + who + " outside the cavity at " + to_string(r));
  }
}

}  // namespace cavdd::cli
