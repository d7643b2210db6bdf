#pragma once

// JSON readers for grids, densities and nuclei, and the cell-constant
// sidecar file. Every schema error names the offending path.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coulomb2d/coulomb.hpp"
#include "coulomb2d/field2d.hpp"
#include "json.hpp"

namespace c2d {

using json = nlohmann::json;

/// Malformed input; `what()` starts with the JSON path of the problem.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& message) : std::runtime_error(path + ": " + message) {}
};

namespace io {

inline const json& member(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  if (!j.contains(key)) throw ConfigError(path, "missing key \"" + key + "\"");
  return j.at(key);
}

inline void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(path + "." + key, "unknown key");
  }
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

inline double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0.0)) throw ConfigError(path, "must be positive");
  return v;
}

inline int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<int>();
}

inline Point point(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(path, "expected [x, y]");
  return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

/// {"n": int, "extent": number, "origin": [x, y] (optional)}
inline GridSpec parse_grid(const json& j, const std::string& path = "grid") {
  require_keys(j, {"n", "extent", "origin"}, path);
  GridSpec g;
  g.n = integer(member(j, "n", path), path + ".n");
  if (g.n < 8) throw ConfigError(path + ".n", "must be at least 8");
  g.extent = positive(member(j, "extent", path), path + ".extent");
  if (j.contains("origin")) g.origin = point(j.at("origin"), path + ".origin");
  return g;
}

/// {"kind": "gaussian", "C": number, "A": number, "center": [x, y]}
inline GaussianSpec parse_gaussian(const json& j, const std::string& path) {
  require_keys(j, {"kind", "C", "A", "center"}, path);
  if (j.contains("kind") && j.at("kind") != "gaussian") throw ConfigError(path + ".kind", "expected \"gaussian\"");
  GaussianSpec g;
  g.C = positive(member(j, "C", path), path + ".C");
  g.A = positive(member(j, "A", path), path + ".A");
  if (j.contains("center")) g.center = point(j.at("center"), path + ".center");
  return g;
}

/// A single Gaussian or {"kind": "mixture", "components": [...]}.
inline std::vector<GaussianSpec> parse_density(const json& j, const std::string& path = "density") {
  const json& kind = member(j, "kind", path);
  if (kind == "gaussian") return {parse_gaussian(j, path)};
  if (kind == "mixture") {
    require_keys(j, {"kind", "components"}, path);
    const json& comps = member(j, "components", path);
    if (!comps.is_array() || comps.empty()) throw ConfigError(path + ".components", "expected a non-empty array");
    std::vector<GaussianSpec> out;
    for (std::size_t k = 0; k < comps.size(); ++k)
      out.push_back(parse_gaussian(comps[k], path + ".components[" + std::to_string(k) + "]"));
    return out;
  }
  throw ConfigError(path + ".kind", "expected \"gaussian\" or \"mixture\"");
}

/// {"z": number, "positions": [[x, y], ...]}
inline NucleiConfig parse_nuclei(const json& j, const std::string& path = "nuclei") {
  require_keys(j, {"z", "positions"}, path);
  NucleiConfig n;
  n.z = number(member(j, "z", path), path + ".z");
  if (n.z < 0.0) throw ConfigError(path + ".z", "must be nonnegative");
  const json& pos = member(j, "positions", path);
  if (!pos.is_array() || pos.empty()) throw ConfigError(path + ".positions", "expected a non-empty array");
  for (std::size_t k = 0; k < pos.size(); ++k)
    n.positions.push_back(point(pos[k], path + ".positions[" + std::to_string(k) + "]"));
  try {
    n.validate();
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
  return n;
}

inline json to_json(Point p) { return json::array({p.x, p.y}); }

inline json to_json(const GridSpec& g) { return {{"n", g.n}, {"extent", g.extent}, {"origin", to_json(g.origin)}}; }

inline json to_json(const GaussianSpec& g) {
  return {{"kind", "gaussian"}, {"C", g.C}, {"A", g.A}, {"center", to_json(g.center)}};
}

inline json to_json(const std::vector<GaussianSpec>& density) {
  if (density.size() == 1) return to_json(density.front());
  json comps = json::array();
  for (const auto& g : density) comps.push_back(to_json(g));
  return {{"kind", "mixture"}, {"components", comps}};
}

inline json to_json(const NucleiConfig& n) {
  json pos = json::array();
  for (const auto& p : n.positions) pos.push_back(to_json(p));
  return {{"z", n.z}, {"positions", pos}};
}

inline json read_json_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(file.string(), "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(file.string(), std::string("malformed JSON at byte ") + std::to_string(e.byte));
  }
}

/// Tolerances the sidecar values were checked against when written.
struct CellConstantTolerances {
  double derivation_abs = 1e-8;
  double oracle_rel = 1e-6;
};

inline json cell_constants_json(const CellConstants& c, const CellConstantTolerances& tol = {}) {
  return {{"version", cell_constants_version},
          {"c_self", c.c_self},
          {"c_nuc", c.c_nuc},
          {"c_trap", c.c_trap},
          {"tolerances", {{"derivation_abs", tol.derivation_abs}, {"oracle_rel", tol.oracle_rel}}}};
}

inline void write_cell_constants(const std::filesystem::path& file, const CellConstants& c,
                                 const CellConstantTolerances& tol = {}) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << cell_constants_json(c, tol).dump(2) << '\n';
}

/// Reads a sidecar; empty if the file is missing or from another version.
inline std::optional<CellConstants> read_cell_constants(const std::filesystem::path& file) {
  if (!std::filesystem::exists(file)) return std::nullopt;
  const json j = read_json_file(file);
  const std::string p = file.string();
  if (integer(member(j, "version", p), p + ".version") != cell_constants_version) return std::nullopt;
  CellConstants c;
  c.c_self = positive(member(j, "c_self", p), p + ".c_self");
  c.c_nuc = positive(member(j, "c_nuc", p), p + ".c_nuc");
  c.c_trap = positive(member(j, "c_trap", p), p + ".c_trap");
  return c;
}

}  // namespace io
}  // namespace c2d
