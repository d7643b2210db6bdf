#pragma once

// Batch driver behind the coulomb2d command: parses flags and an optional
// JSON config, runs one verification suite and writes a JSON report (plus a
// CSV table for the sweep commands).
//
// Exit codes: 0 every check passed, 1 some check failed, 2 bad arguments or
// configuration.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coulomb2d/coulomb.hpp"
#include "coulomb2d/field2d.hpp"
#include "coulomb2d/geometry.hpp"
#include "coulomb2d/io.hpp"
#include "coulomb2d/manybody.hpp"
#include "coulomb2d/radial.hpp"
#include "coulomb2d/stability.hpp"
#include "coulomb2d/trials.hpp"

namespace c2d::cli {

inline constexpr int report_schema = 1;
inline constexpr std::uint64_t default_seed = 20240611;

enum class Relation {
  absolute,  ///< |value - expected| <= tolerance
  relative,  ///< |value - expected| <= tolerance |expected|
  at_least,  ///< value >= expected - tolerance
  at_most,   ///< value <= expected + tolerance
};

inline const char* relation_name(Relation r) {
  switch (r) {
    case Relation::absolute: return "abs";
    case Relation::relative: return "rel";
    case Relation::at_least: return "ge";
    case Relation::at_most: return "le";
  }
  return "?";
}

struct Check {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  Relation relation = Relation::absolute;
  bool pass = false;

  double gap() const { return value - expected; }

  json to_json() const {
    return {{"name", name},         {"value", value},     {"expected", expected},
            {"tolerance", tolerance}, {"relation", relation_name(relation)}, {"gap", gap()},
            {"pass", pass}};
  }
};

inline bool evaluate(Relation r, double value, double expected, double tol) {
  if (!std::isfinite(value)) return false;
  switch (r) {
    case Relation::absolute: return std::abs(value - expected) <= tol;
    case Relation::relative: return std::abs(value - expected) <= tol * std::abs(expected);
    case Relation::at_least: return value >= expected - tol;
    case Relation::at_most: return value <= expected + tol;
  }
  return false;
}

class Report {
 public:
  explicit Report(std::string command) : command_(std::move(command)) {}

  const Check& add(std::string name, double value, double expected, double tolerance, Relation relation) {
    Check c{std::move(name), value, expected, tolerance, relation, evaluate(relation, value, expected, tolerance)};
    checks_.push_back(c);
    return checks_.back();
  }

  json& data() { return data_; }
  json& config() { return config_; }
  const std::vector<Check>& checks() const { return checks_; }
  const std::string& command() const { return command_; }

  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& c : checks_) n += c.pass ? 0 : 1;
    return n;
  }
  bool all_pass() const { return failures() == 0; }

  /// Everything except `wall_time_s` depends only on the inputs.
  json to_json(double wall_time) const {
    json checks = json::array();
    for (const auto& c : checks_) checks.push_back(c.to_json());
    return {{"schema", report_schema},
            {"command", command_},
            {"config", config_},
            {"cell_constants_version", cell_constants_version},
            {"checks", checks},
            {"summary", {{"checks", checks_.size()}, {"failed", failures()}, {"pass", all_pass()}}},
            {"data", data_},
            {"wall_time_s", wall_time}};
  }

 private:
  std::string command_;
  json config_ = json::object();
  json data_ = json::object();
  std::vector<Check> checks_;
};

/// Minimal CSV writer with round-trip precision.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(const std::vector<double>& row) {
    if (row.size() != columns_.size()) throw std::logic_error("CsvTable: row width mismatch");
    rows_.push_back(row);
  }

  void write(const std::filesystem::path& file) const {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    for (std::size_t k = 0; k < columns_.size(); ++k) out << (k ? "," : "") << columns_[k];
    out << '\n' << std::setprecision(17);
    for (const auto& r : rows_) {
      for (std::size_t k = 0; k < r.size(); ++k) out << (k ? "," : "") << r[k];
      out << '\n';
    }
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

/// Documented default tolerances; a config's "tolerances" object may
/// override any of them by name.
inline std::map<std::string, double> default_tolerances(const std::string& command) {
  if (command == "constants") return {{"beta_abs", 5e-5}, {"lsy_abs", 0.01}, {"cell_rel", 1e-6}};
  if (command == "stability")
    return {{"sigma_residual", 1e-12}, {"M_agreement", 1e-12}, {"M_floor", 1e-12}, {"constraint_abs", 1e-10}};
  if (command == "verify-xi") return {{"xi_rel", 1e-3}};
  if (command == "verify-bound")
    return {{"energy_rel", 1e-4},   {"pair_rel", 1e-6},   {"mass_rel", 1e-6},
            {"stationarity", 1e-8}, {"golden_rel", 1e-8}, {"margin_ratio_rel", 1e-2}};
  if (command == "check-lemma-halfplane") return {{"rel", 1e-8}};
  if (command == "check-uncertainty")
    return {{"lemma_rel", 1e-9}, {"equality_rel", 1e-8}, {"theorem_rel", 1e-9}, {"floor_rel", 1e-2}};
  if (command == "check-lieb-yau") return {{"gap_rel", 1e-3}};
  if (command == "compare-lsy") return {{"margin_abs", 0.0}};
  return {};
}

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"constants",          "stability",          "verify-xi",
                                              "verify-bound",       "check-lemma-halfplane", "check-uncertainty",
                                              "check-lieb-yau",     "compare-lsy"};
  return names;
}

/// Flags merged with the optional config file; flags win.
struct RunConfig {
  std::string command;
  std::filesystem::path out = ".";
  std::uint64_t seed = default_seed;
  std::optional<int> trials;
  std::optional<double> a, b, z, A, L, extent;
  std::optional<int> n;
  json file = json::object();
  std::map<std::string, double> tolerances;

  double tol(const std::string& name) const { return tolerances.at(name); }

  int trials_or(int fallback) const { return trials.value_or(fallback); }
  int n_or(int fallback) const { return n.value_or(fallback); }

  /// Flag value, else config key, else fallback.
  double number(const std::optional<double>& flag, const char* key, double fallback) const {
    if (flag) return *flag;
    if (file.contains(key)) return io::number(file.at(key), std::string("config.") + key);
    return fallback;
  }

  /// A flag or config entry that may be a number or an array of numbers.
  std::vector<double> numbers(const std::optional<double>& flag, const char* key, std::vector<double> fallback) const {
    if (flag) return {*flag};
    if (!file.contains(key)) return fallback;
    const json& j = file.at(key);
    const std::string path = std::string("config.") + key;
    if (j.is_number()) return {io::number(j, path)};
    if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a number or a non-empty array");
    std::vector<double> out;
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(io::number(j[k], path + "[" + std::to_string(k) + "]"));
    return out;
  }

  json echo() const {
    json j = file;
    j["seed"] = seed;
    if (trials) j["trials"] = *trials;
    if (n) j["n"] = *n;
    if (a) j["a"] = *a;
    if (b) j["b"] = *b;
    if (z) j["z"] = *z;
    if (A) j["A"] = *A;
    if (L) j["L"] = *L;
    if (extent) j["extent"] = *extent;
    j["tolerances"] = tolerances;
    return j;
  }
};

namespace detail {

inline std::string indexed(const std::string& prefix, std::size_t k) {
  std::ostringstream s;
  s << prefix << std::setw(3) << std::setfill('0') << k;
  return s.str();
}

inline std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> out;
  for (int k = 0; k < points; ++k)
    out.push_back(points == 1 ? lo : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * k / (points - 1)));
  return out;
}

inline std::pair<double, double> range(const RunConfig& cfg, const char* key, std::pair<double, double> fallback) {
  if (!cfg.file.contains(key)) return fallback;
  const json& j = cfg.file.at(key);
  const std::string path = std::string("config.") + key;
  if (!j.is_array() || j.size() != 2) throw ConfigError(path, "expected [lo, hi]");
  const double lo = io::positive(j[0], path + "[0]"), hi = io::positive(j[1], path + "[1]");
  if (!(lo <= hi)) throw ConfigError(path, "lo must not exceed hi");
  return {lo, hi};
}

inline int config_int(const RunConfig& cfg, const char* key, int fallback, int minimum) {
  if (!cfg.file.contains(key)) return fallback;
  const std::string path = std::string("config.") + key;
  const int v = io::integer(cfg.file.at(key), path);
  if (v < minimum) throw ConfigError(path, "must be at least " + std::to_string(minimum));
  return v;
}

/// Values of c_self, c_nuc and c_trap in closed form.
inline CellConstants closed_form_cell_constants() {
  const double l = std::log(1.0 + std::sqrt(2.0));
  CellConstants c;
  c.c_nuc = 4.0 * l;
  c.c_self = 4.0 * l - 4.0 / 3.0 * (std::sqrt(2.0) - 1.0);
  // -4 zeta(1/2) beta(1/2)
  c.c_trap = -4.0 * -1.4603545088095868129 * 0.66769145718960917;
  return c;
}

/// Density and nuclei given in the config file, if both are present.
struct ExplicitSystem {
  std::vector<GaussianSpec> density;
  NucleiConfig nuclei;
  GridSpec grid;
};

inline std::optional<ExplicitSystem> explicit_system(const RunConfig& cfg, int default_n) {
  const bool has_density = cfg.file.contains("density"), has_nuclei = cfg.file.contains("nuclei");
  if (!has_density && !has_nuclei) return std::nullopt;
  if (!has_density) throw ConfigError("config", "\"nuclei\" given without \"density\"");
  if (!has_nuclei) throw ConfigError("config", "\"density\" given without \"nuclei\"");
  ExplicitSystem s;
  s.density = io::parse_density(cfg.file.at("density"), "config.density");
  s.nuclei = io::parse_nuclei(cfg.file.at("nuclei"), "config.nuclei");
  if (cfg.z) s.nuclei.z = *cfg.z;
  if (cfg.file.contains("grid")) {
    s.grid = io::parse_grid(cfg.file.at("grid"), "config.grid");
  } else {
    s.grid = enclosing_grid(default_n, s.density, s.nuclei);
  }
  if (cfg.n) s.grid.n = *cfg.n;
  if (cfg.extent) s.grid.extent = *cfg.extent;
  return s;
}

inline DensityField build_field(const std::vector<GaussianSpec>& density, const GridSpec& grid) {
  try {
    return mixture_density(density, grid);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config.grid", e.what());
  }
}

}  // namespace detail

inline void run_constants(const RunConfig& cfg, Report& report) {
  const double beta = beta_constant(), lsy = lsy_constant();
  report.add("beta", beta, 5.9045, cfg.tol("beta_abs"), Relation::absolute);
  report.add("C_LSY", lsy, 481.27, cfg.tol("lsy_abs"), Relation::absolute);
  const CellConstants& c = cell_constants();
  const CellConstants ref = detail::closed_form_cell_constants();
  report.add("c_self", c.c_self, ref.c_self, cfg.tol("cell_rel"), Relation::relative);
  report.add("c_nuc", c.c_nuc, ref.c_nuc, cfg.tol("cell_rel"), Relation::relative);
  report.add("c_trap", c.c_trap, ref.c_trap, cfg.tol("cell_rel"), Relation::relative);
  report.data() = {{"beta", beta}, {"C_LSY", lsy}, {"cell_constants", io::cell_constants_json(c)}};
  io::write_cell_constants(cfg.out / "cell_constants.json", c);
}

inline void run_stability(const RunConfig& cfg, Report& report) {
  std::vector<double> as, bs;
  if (cfg.a || cfg.b || cfg.file.contains("a") || cfg.file.contains("b")) {
    as = cfg.numbers(cfg.a, "a", {1.0});
    bs = cfg.numbers(cfg.b, "b", {1.0});
  } else {
    const int points = detail::config_int(cfg, "grid_points", 20, 1);
    const auto [alo, ahi] = detail::range(cfg, "a_range", {0.1, 10.0});
    const auto [blo, bhi] = detail::range(cfg, "b_range", {0.1, 10.0});
    as = detail::log_grid(alo, ahi, points);
    bs = detail::log_grid(blo, bhi, points);
  }
  for (double v : as)
    if (!(v > 0.0)) throw ConfigError("a", "must be positive");
  for (double v : bs)
    if (!(v > 0.0)) throw ConfigError("b", "must be positive");
  const int p_samples = detail::config_int(cfg, "p_samples", 1001, 2);

  CsvTable csv({"a", "b", "sigma", "z_c", "min_M_over_p"});
  double worst_residual = 0.0, worst_agreement = 0.0, worst_floor = std::numeric_limits<double>::infinity();
  json worst_floor_at;
  for (double a : as)
    for (double b : bs) {
      const SigmaRoot root = sigma_root(a, b);
      worst_residual = std::max(worst_residual, root.relative_residual(sigma_equation_rhs(a, b)));
      double min_M = std::numeric_limits<double>::infinity();
      for (int k = 0; k < p_samples; ++k) {
        const double p = static_cast<double>(k) / (p_samples - 1);
        const auto s = StabilityParams::theorem_split(a, b, p);
        const double M = bracket_M(s), closed = bracket_M_closed_form(s), scale = bracket_M_scale(s);
        min_M = std::min(min_M, M);
        if (scale > 0.0) {
          worst_agreement = std::max(worst_agreement, std::abs(M - closed) / scale);
          if (M / scale < worst_floor) {
            worst_floor = M / scale;
            worst_floor_at = {{"a", a}, {"b", b}, {"p", p}};
          }
        }
      }
      csv.add_row({a, b, root.sigma, 0.5 * a * b * std::sqrt(root.complement), min_M});
    }
  report.add("sigma_residual_max", worst_residual, 0.0, cfg.tol("sigma_residual"), Relation::at_most);
  report.add("M_agreement_max", worst_agreement, 0.0, cfg.tol("M_agreement"), Relation::at_most);
  report.add("M_over_scale_min", worst_floor, 0.0, cfg.tol("M_floor"), Relation::at_least);
  for (double eps : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    const auto bp = BoundParams::from_epsilon(eps);
    std::ostringstream name;
    name << "bound_constraint_eps_" << eps;
    report.add(name.str(), bp.constraint_value(), 2.0, cfg.tol("constraint_abs"), Relation::at_least);
  }
  report.data() = {{"points", as.size() * bs.size()}, {"p_samples", p_samples}, {"worst_M_at", worst_floor_at}};
  csv.write(cfg.out / "stability.csv");
}

inline void run_verify_xi(const RunConfig& cfg, Report& report) {
  const double tol = cfg.tol("xi_rel");
  if (auto sys = detail::explicit_system(cfg, cfg.n_or(128))) {
    const double a = cfg.number(cfg.a, "a", 1.0), b = cfg.number(cfg.b, "b", 1.0);
    const auto rho = detail::build_field(sys->density, sys->grid);
    const auto terms = xi_terms(rho, sys->nuclei, a, b);
    const double zc = critical_charge(a, b);
    const bool applies = sys->nuclei.z <= zc * (1.0 + 1e-12);
    if (applies) report.add("xi_nonnegative", terms.total(), 0.0, tol * terms.scale(), Relation::at_least);
    report.data() = {{"xi", terms.total()}, {"scale", terms.scale()}, {"z_c", zc}, {"theorem_applies", applies}};
    return;
  }
  TrialRng rng(cfg.seed);
  const int trials = cfg.trials_or(100);
  const int n = cfg.n_or(128);
  json rows = json::array();
  double worst = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    auto trial = random_molecule(rng, n, 1, 5, 1.0);
    if (cfg.a) trial.a = *cfg.a;
    if (cfg.b) trial.b = *cfg.b;
    trial.nuclei.z = cfg.z.value_or(critical_charge(trial.a, trial.b));
    const auto terms = xi_terms(trial.field(), trial.nuclei, trial.a, trial.b);
    report.add(detail::indexed("trial_", t), terms.total(), 0.0, tol * terms.scale(), Relation::at_least);
    worst = std::min(worst, terms.total() / terms.scale());
    rows.push_back({{"K", trial.nuclei.size()}, {"a", trial.a}, {"b", trial.b}, {"z", trial.nuclei.z},
                    {"xi", terms.total()}, {"scale", terms.scale()}});
  }
  report.data() = {{"seed", cfg.seed}, {"trials", rows}, {"min_xi_over_scale", worst}};
}

inline void run_verify_bound(const RunConfig& cfg, Report& report) {
  const auto As = cfg.numbers(cfg.A, "A", {0.25, 1.0, 4.0, 16.0});
  const auto epsilons = cfg.numbers(std::nullopt, "epsilons", {0.1, 0.5, 2.0, 10.0});
  for (double A : As)
    if (!(A > 0.0)) throw ConfigError("A", "must be positive");
  for (double e : epsilons)
    if (!(e > 0.0)) throw ConfigError("config.epsilons", "entries must be positive");
  const int n = cfg.n_or(256);
  CsvTable csv({"A", "E_psi", "rhs_new", "rhs_lsy", "margin"});
  json reports = json::array();
  std::vector<double> ratios;
  for (double A : As) {
    std::ostringstream tag;
    tag << "A_" << A << ":";
    const auto state = TwoBodyState::product_gaussian(A);
    GridSpec grid = default_grid(state, n);
    if (cfg.extent) grid.extent = *cfg.extent;
    const auto rho = detail::build_field(state.orbital.density_terms(), grid).scaled(2.0);
    const double pair_q = pair_repulsion_quadrature(state), pair_id = pair_repulsion_identity(state);
    BoundReport r;
    r.E_psi = pair_q - direct_energy(rho);
    r.L = lp32_integral(rho);
    r.G = weizsacker_integral(rho);
    r.epsilon_star = optimal_epsilon(r.L, r.G);
    r.rhs_new = bound_rhs(r.L, r.G, r.epsilon_star);
    r.rhs_lsy = lsy_rhs(r.L);
    ratios.push_back(r.margin_ratio());

    report.add(tag.str() + "E_psi", r.E_psi, -0.5 * std::sqrt(2.0 * pi * A), cfg.tol("energy_rel"), Relation::relative);
    report.add(tag.str() + "pair_quadrature_vs_identity", pair_q, pair_id, cfg.tol("pair_rel"), Relation::relative);
    report.add(tag.str() + "reduced_density_mass", integrate(rho), 2.0, cfg.tol("mass_rel"), Relation::relative);
    report.add(tag.str() + "stationarity", stationarity_residual(r.L, r.G, r.epsilon_star), 0.0,
               cfg.tol("stationarity"), Relation::at_most);
    const long double Ll = r.L, Gl = r.G, beta = beta_constant();
    const double x = golden_section_minimize(
        [&](double lx) {
          const long double e = std::exp(static_cast<long double>(lx));
          return (1.0L + e) * beta * Ll + 4.0L * Gl / (beta * e);
        },
        std::log(1e-4), std::log(1e4));
    report.add(tag.str() + "golden_section_epsilon", std::exp(x), r.epsilon_star, cfg.tol("golden_rel"),
               Relation::relative);
    report.add(tag.str() + "bound_at_eps_star", r.E_psi, r.rhs_new, 0.0, Relation::at_least);
    double best_other = -std::numeric_limits<double>::infinity();
    for (double e : epsilons) {
      const double rhs = bound_rhs(r.L, r.G, e);
      std::ostringstream name;
      name << tag.str() << "bound_at_eps_" << e;
      report.add(name.str(), r.E_psi, rhs, 0.0, Relation::at_least);
      best_other = std::max(best_other, rhs);
    }
    report.add(tag.str() + "eps_star_tightest", r.rhs_new, best_other, 0.0, Relation::at_least);
    report.add(tag.str() + "lsy_bound", r.E_psi, r.rhs_lsy, 0.0, Relation::at_least);
    csv.add_row({A, r.E_psi, r.rhs_new, r.rhs_lsy, r.margin_new()});
    reports.push_back({{"A", A},
                       {"E_psi", r.E_psi},
                       {"L", r.L},
                       {"G", r.G},
                       {"epsilon_star", r.epsilon_star},
                       {"rhs_new", r.rhs_new},
                       {"rhs_lsy", r.rhs_lsy},
                       {"margin_new", r.margin_new()},
                       {"margin_lsy", r.margin_lsy()},
                       {"margin_ratio", r.margin_ratio()}});
  }
  if (ratios.size() > 1) {
    double spread = 0.0;
    for (double q : ratios) spread = std::max(spread, std::abs(q / ratios.front() - 1.0));
    report.add("margin_ratio_spread", spread, 0.0, cfg.tol("margin_ratio_rel"), Relation::at_most);
  }
  report.data() = {{"bound_reports", reports}, {"n", n}};
  csv.write(cfg.out / "verify-bound.csv");
}

inline void run_halfplane(const RunConfig& cfg, Report& report) {
  const auto Ls = cfg.numbers(cfg.L, "L", {0.5, 1.0, 2.0, 7.0});
  json rows = json::array();
  for (double L : Ls) {
    if (!(L > 0.0)) throw ConfigError("L", "must be positive");
    const auto h = verify_halfplane_tail(L);
    std::ostringstream name;
    name << "L_" << L;
    report.add(name.str(), h.numeric, h.analytic, cfg.tol("rel"), Relation::relative);
    rows.push_back({{"L", L}, {"analytic", h.analytic}, {"numeric", h.numeric}, {"relative_gap", h.relative_gap}});
  }
  report.data() = {{"results", rows}};
}

inline void run_uncertainty(const RunConfig& cfg, Report& report) {
  TrialRng rng(cfg.seed);
  const int trials = cfg.trials_or(50);
  const int points = cfg.n_or(96);
  double worst_lemma = std::numeric_limits<double>::infinity(), worst_theorem = worst_lemma;
  for (int t = 0; t < trials; ++t) {
    const double R = rng.log_uniform(0.5, 5.0);
    const auto grid = make_radial_grid(R, points);
    const auto f = RadialFunction::sample(grid, random_radial_profile(rng, R));
    const auto coulomb_u = RadialWeight::coulomb(grid);
    const auto smooth_u = RadialWeight::smooth(grid, random_smooth_weight(rng, R));
    for (const auto* u : {&coulomb_u, &smooth_u}) {
      const double lhs = lemma_lhs(f, *u), rhs = lemma_rhs(f, *u);
      report.add(detail::indexed(u == &coulomb_u ? "lemma_coulomb_" : "lemma_smooth_", t), rhs, lhs,
                 cfg.tol("lemma_rel") * rhs, Relation::at_least);
      worst_lemma = std::min(worst_lemma, (rhs - lhs) / rhs);
    }
    const double a = rng.log_uniform(0.1, 10.0), b = rng.log_uniform(0.1, 10.0);
    const auto terms = uncertainty_terms(f);
    report.add(detail::indexed("theorem_", t), terms.gap(a, b), 0.0, cfg.tol("theorem_rel") * terms.lhs(a, b),
               Relation::at_least);
    worst_theorem = std::min(worst_theorem, terms.gap(a, b) / terms.lhs(a, b));
  }
  const auto unit = make_radial_grid(1.0, points);
  const auto u = RadialWeight::coulomb(unit);
  json family = json::array();
  for (const auto& params : {EqualityFamilyParams{1.0, 1.0}, EqualityFamilyParams{3.0, 0.5},
                             EqualityFamilyParams{0.2, 2.0}}) {
    const auto f = equality_family(params, u);
    const double lhs = lemma_lhs(f, u), rhs = lemma_rhs(f, u);
    std::ostringstream name;
    name << "equality_lambda_" << params.lambda << "_C_" << params.C;
    report.add(name.str(), (rhs - lhs) / rhs, 0.0, cfg.tol("equality_rel"), Relation::at_most);
    family.push_back({{"lambda", params.lambda}, {"C", params.C}, {"lhs", lhs}, {"rhs", rhs}});
  }
  // Gap per unit a b as a function of t = b / a, minimized over a log scan.
  const auto f = equality_family({1.0, 1.0}, u);
  const auto terms = uncertainty_terms(f);
  double scan_min = std::numeric_limits<double>::infinity();
  for (double t : detail::log_grid(1e-2, 1e2, 4001)) scan_min = std::min(scan_min, terms.gap(1.0 / std::sqrt(t), std::sqrt(t)));
  const double floor = uncertainty_floor(f);
  report.add("am_gm_floor", scan_min, floor, cfg.tol("floor_rel"), Relation::relative);
  report.data() = {{"seed", cfg.seed},
                   {"min_lemma_relative_gap", worst_lemma},
                   {"min_theorem_relative_gap", worst_theorem},
                   {"equality_family", family},
                   {"scan_min", scan_min},
                   {"floor", floor}};
}

inline void run_lieb_yau(const RunConfig& cfg, Report& report) {
  const double tol = cfg.tol("gap_rel");
  if (auto sys = detail::explicit_system(cfg, cfg.n_or(128))) {
    const auto rho = detail::build_field(sys->density, sys->grid);
    if (sys->nuclei.size() < 2) throw ConfigError("config.nuclei.positions", "needs at least two nuclei");
    const auto terms = lieb_yau_terms(rho, build_voronoi(sys->nuclei, rho.grid()));
    report.add("lieb_yau_gap", terms.gap(), 0.0, tol * terms.scale(), Relation::at_least);
    report.data() = {{"lhs", terms.lhs()}, {"bound", terms.bound}};
    return;
  }
  TrialRng rng(cfg.seed);
  const int trials = cfg.trials_or(100);
  const int n = cfg.n_or(128);
  json rows = json::array();
  double worst = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const double z = cfg.z.value_or(rng.uniform(0.2, 3.0));
    const auto trial = random_molecule(rng, n, 2, 6, z);
    const auto rho = trial.field();
    const auto terms = lieb_yau_terms(rho, build_voronoi(trial.nuclei, rho.grid()));
    report.add(detail::indexed("trial_", t), terms.gap(), 0.0, tol * terms.scale(), Relation::at_least);
    worst = std::min(worst, terms.gap() / terms.scale());
    rows.push_back({{"K", trial.nuclei.size()}, {"z", z}, {"lhs", terms.lhs()}, {"bound", terms.bound}});
  }
  report.data() = {{"seed", cfg.seed}, {"trials", rows}, {"min_gap_over_scale", worst}};
}

inline void run_compare_lsy(const RunConfig& cfg, Report& report) {
  const int n = cfg.n_or(256);
  json rows = json::array();
  auto compare = [&](const std::string& name, const DensityField& rho) {
    const double L = lp32_integral(rho), G = weizsacker_integral(rho);
    const double rhs_new = optimal_bound_rhs(L, G), rhs_lsy = lsy_rhs(L);
    report.add(name, rhs_new, rhs_lsy, cfg.tol("margin_abs"), Relation::at_least);
    rows.push_back({{"name", name}, {"L", L}, {"G", G}, {"rhs_new", rhs_new}, {"rhs_lsy", rhs_lsy}});
  };
  for (double A : cfg.numbers(cfg.A, "A", {0.25, 1.0, 4.0, 16.0})) {
    if (!(A > 0.0)) throw ConfigError("A", "must be positive");
    const auto state = TwoBodyState::product_gaussian(A);
    std::ostringstream name;
    name << "product_state_A_" << A;
    compare(name.str(), reduced_density(state, default_grid(state, n)));
  }
  for (double N : {1.0, 2.0, 10.0, 100.0}) {
    const GridSpec grid{n, 12.0, {}};
    std::ostringstream name;
    name << "gaussian_N_" << N;
    compare(name.str(), gaussian_density(GaussianSpec::normalized(N, 1.0), grid));
  }
  report.data() = {{"comparisons", rows}};
}

inline void dispatch(const RunConfig& cfg, Report& report) {
  const std::string& c = cfg.command;
  if (c == "constants") return run_constants(cfg, report);
  if (c == "stability") return run_stability(cfg, report);
  if (c == "verify-xi") return run_verify_xi(cfg, report);
  if (c == "verify-bound") return run_verify_bound(cfg, report);
  if (c == "check-lemma-halfplane") return run_halfplane(cfg, report);
  if (c == "check-uncertainty") return run_uncertainty(cfg, report);
  if (c == "check-lieb-yau") return run_lieb_yau(cfg, report);
  if (c == "compare-lsy") return run_compare_lsy(cfg, report);
  throw ConfigError("command", "unknown command " + c);
}

inline void load_config_file(RunConfig& cfg, const std::filesystem::path& file) {
  cfg.file = io::read_json_file(file);
  io::require_keys(cfg.file,
                   {"grid", "density", "nuclei", "a", "b", "z", "A", "L", "epsilons", "a_range", "b_range",
                    "grid_points", "p_samples", "seed", "trials", "n", "extent", "tolerances"},
                   "config");
  const json& j = cfg.file;
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("config.seed", "expected a nonnegative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("trials")) cfg.trials = io::integer(j.at("trials"), "config.trials");
  if (j.contains("n")) cfg.n = io::integer(j.at("n"), "config.n");
  if (j.contains("extent")) cfg.extent = io::positive(j.at("extent"), "config.extent");
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (!t.is_object()) throw ConfigError("config.tolerances", "expected an object");
    for (const auto& [key, value] : t.items()) {
      const std::string path = "config.tolerances." + key;
      if (!cfg.tolerances.count(key)) throw ConfigError(path, "unknown tolerance for " + cfg.command);
      const double v = io::number(value, path);
      if (v < 0.0) throw ConfigError(path, "must be nonnegative");
      cfg.tolerances[key] = v;
    }
  }
}

/// Entry point: `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Numerical checks for two-dimensional Coulomb energy bounds", "coulomb2d"};
  app.require_subcommand(1, 1);
  RunConfig cfg;
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  for (const auto& name : commands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "seed for randomized trials");
    sub->add_option("--trials", cfg.trials, "number of randomized trials")->check(CLI::PositiveNumber);
    sub->add_option("--a", cfg.a, "gradient coupling a");
    sub->add_option("--b", cfg.b, "power coupling b");
    sub->add_option("--z", cfg.z, "nuclear charge z");
    sub->add_option("--A", cfg.A, "Gaussian decay A");
    sub->add_option("--L", cfg.L, "half-plane distance L");
    sub->add_option("--n", cfg.n, "grid cells per axis (radial points for check-uncertainty)")->check(CLI::Range(8, 1 << 14));
    sub->add_option("--extent", cfg.extent, "grid side length")->check(CLI::PositiveNumber);
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  cfg.tolerances = default_tolerances(cfg.command);
  cfg.out = out_dir;

  const auto start = std::chrono::steady_clock::now();
  Report report(cfg.command);
  try {
    if (!config_path.empty()) load_config_file(cfg, config_path);
    if (seed) cfg.seed = *seed;
    std::filesystem::create_directories(cfg.out);
    report.config() = cfg.echo();
    dispatch(cfg, report);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto report_path = cfg.out / (cfg.command + ".json");
  std::ofstream file(report_path);
  if (!file) {
    err << "error: cannot write " << report_path.string() << '\n';
    return 2;
  }
  file << report.to_json(wall).dump(2) << '\n';

  for (const auto& c : report.checks())
    if (!c.pass)
      out << "FAIL " << c.name << ": value " << std::setprecision(17) << c.value << " expected " << c.expected
          << " (" << relation_name(c.relation) << ", tolerance " << c.tolerance << ", gap " << c.gap() << ")\n";
  out << cfg.command << ": " << report.checks().size() - report.failures() << "/" << report.checks().size()
      << " checks passed; report " << report_path.string() << '\n';
  return report.all_pass() ? 0 : 1;
}

}  // namespace c2d::cli
