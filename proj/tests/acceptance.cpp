// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are fixed here and are not configurable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "coulomb2d/geometry.hpp"
#include "coulomb2d/manybody.hpp"
#include "coulomb2d/radial.hpp"
#include "coulomb2d/stability.hpp"
#include "coulomb2d/trials.hpp"

using namespace c2d;

namespace {

constexpr std::uint64_t seed = 20240611;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Fourier radial reduction for a Gaussian of mass N and decay A:
// D = (1/2) int N^2 exp(-k^2 / (2A)) dk over k > 0 (times 2 pi / (2 pi)).
double gaussian_D_oracle(double N, double A) {
  return 0.5 * integrate_adaptive([&](double k) { return N * N * std::exp(-k * k / (2.0 * A)); }, 0.0,
                                  std::numeric_limits<double>::infinity());
}

Outcome ac1() {
  const double beta = beta_constant(), lsy = lsy_constant();
  std::ostringstream s;
  s.precision(10);
  s << "beta = " << beta << ", C_LSY = " << lsy;
  return {std::abs(beta - 5.9045) <= 5e-5 && std::abs(lsy - 481.27) <= 0.01, s.str()};
}

Outcome ac2() {
  double worst = 0.0;
  for (double L : {0.5, 1.0, 2.0, 7.0}) worst = std::max(worst, verify_halfplane_tail(L).relative_gap);
  std::ostringstream s;
  s << "max relative gap " << worst;
  return {worst <= 1e-8, s.str()};
}

Outcome ac3() {
  double worst_lg = 0.0, worst_ratio = 0.0;
  for (double A : {0.5, 1.0, 3.0}) {
    const double C = 2.0;
    const auto rho = gaussian_density({C, A, {}}, {512, 12.0 / std::sqrt(A), {}});
    worst_lg = std::max(worst_lg, std::abs(lp32_integral(rho) / (std::pow(C, 1.5) * 2.0 * pi / (3.0 * A)) - 1.0));
    worst_lg = std::max(worst_lg, std::abs(weizsacker_integral(rho) / (std::sqrt(C) * pi) - 1.0));
  }
  for (double N : {1.0, 2.0, 10.0, 100.0}) {
    const auto rho = gaussian_density(GaussianSpec::normalized(N, 1.0), {512, 12.0, {}});
    const double ratio = weizsacker_integral(rho) / lp32_integral(rho);
    worst_ratio = std::max(worst_ratio, std::abs(ratio / (3.0 * pi / (2.0 * N)) - 1.0));
  }
  std::ostringstream s;
  s << "L,G max rel err " << worst_lg << ", G/L max rel err " << worst_ratio;
  return {worst_lg <= 5e-3 && worst_ratio <= 1e-2, s.str()};
}

Outcome ac4() {
  TrialRng rng(seed);
  double worst_pair = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto rho = random_molecule(rng, 64, 1, 3, 1.0).field();
    const double ref = direct_energy_reference(rho), spec = direct_energy_spectral(rho);
    worst_pair = std::max(worst_pair, std::abs(spec - ref) / std::abs(ref));
  }
  const double A = 1.0, N = 2.0;
  const double exact = N * N / 4.0 * std::sqrt(2.0 * pi * A);
  const double oracle = gaussian_D_oracle(N, A);
  const auto rho = gaussian_density(GaussianSpec::normalized(N, A), {256, 12.0, {}});
  ReferenceOptions opt;
  opt.max_n = 256;
  const double ref = direct_energy_reference(rho, opt), spec = direct_energy_spectral(rho);
  const double worst_closed = std::max(std::abs(ref / exact - 1.0), std::abs(spec / exact - 1.0));
  std::ostringstream s;
  s << "spectral vs reference max rel " << worst_pair << ", closed form max rel " << worst_closed
    << ", oracle vs closed form rel " << std::abs(oracle / exact - 1.0);
  return {worst_pair <= 1e-3 && worst_closed <= 1e-2 && std::abs(oracle / exact - 1.0) <= 1e-9, s.str()};
}

Outcome ac5() {
  double worst_residual = 0.0, worst_agreement = 0.0, worst_floor = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      const double a = 0.1 * std::pow(100.0, i / 19.0), b = 0.1 * std::pow(100.0, j / 19.0);
      worst_residual = std::max(worst_residual, sigma_root(a, b).relative_residual(sigma_equation_rhs(a, b)));
      for (int k = 0; k <= 1000; ++k) {
        const auto s = StabilityParams::theorem_split(a, b, k / 1000.0);
        const double scale = bracket_M_scale(s);
        if (scale == 0.0) continue;
        const double M = bracket_M(s);
        worst_agreement = std::max(worst_agreement, std::abs(M - bracket_M_closed_form(s)) / scale);
        worst_floor = std::min(worst_floor, M / scale);
      }
    }
  std::ostringstream s;
  s << "residual " << worst_residual << ", M agreement " << worst_agreement << ", min M/scale " << worst_floor;
  return {worst_residual <= 1e-12 && worst_agreement <= 1e-12 && worst_floor >= -1e-12, s.str()};
}

Outcome ac6() {
  TrialRng rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  for (int t = 0; t < 100; ++t) {
    auto trial = random_molecule(rng, 128, 1, 5, 1.0);
    trial.nuclei.z = critical_charge(trial.a, trial.b);
    const auto terms = xi_terms(trial.field(), trial.nuclei, trial.a, trial.b);
    worst = std::min(worst, terms.total() / terms.scale());
  }
  std::ostringstream s;
  s << "min xi/scale over 100 trials " << worst;
  return {worst >= -1e-3, s.str()};
}

Outcome ac7() {
  TrialRng rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  for (int t = 0; t < 100; ++t) {
    const double z = rng.uniform(0.2, 3.0);
    const auto trial = random_molecule(rng, 128, 2, 6, z);
    const auto rho = trial.field();
    const auto terms = lieb_yau_terms(rho, build_voronoi(trial.nuclei, rho.grid()));
    worst = std::min(worst, terms.gap() / terms.scale());
  }
  std::ostringstream s;
  s << "min gap/scale over 100 trials " << worst;
  return {worst >= -1e-3, s.str()};
}

Outcome ac8() {
  TrialRng rng(seed);
  double worst_lemma = std::numeric_limits<double>::infinity(), worst_theorem = worst_lemma;
  for (int t = 0; t < 50; ++t) {
    const double R = rng.log_uniform(0.5, 5.0);
    const auto grid = make_radial_grid(R);
    const auto f = RadialFunction::sample(grid, random_radial_profile(rng, R));
    for (const auto& u : {RadialWeight::coulomb(grid), RadialWeight::smooth(grid, random_smooth_weight(rng, R))}) {
      const double lhs = lemma_lhs(f, u), rhs = lemma_rhs(f, u);
      worst_lemma = std::min(worst_lemma, (rhs - lhs) / rhs);
    }
    const auto terms = uncertainty_terms(f);
    for (int k = 0; k < 20; ++k) {
      const double a = rng.log_uniform(0.1, 10.0), b = rng.log_uniform(0.1, 10.0);
      worst_theorem = std::min(worst_theorem, terms.gap(a, b) / terms.lhs(a, b));
    }
  }
  const auto unit = make_radial_grid(1.0);
  const auto u = RadialWeight::coulomb(unit);
  double worst_equality = 0.0;
  for (const auto& p : {EqualityFamilyParams{1.0, 1.0}, EqualityFamilyParams{3.0, 0.5}, EqualityFamilyParams{0.2, 2.0}}) {
    const auto f = equality_family(p, u);
    const double lhs = lemma_lhs(f, u), rhs = lemma_rhs(f, u);
    worst_equality = std::max(worst_equality, std::abs(rhs - lhs) / rhs);
  }
  std::ostringstream s;
  s << "min lemma rel gap " << worst_lemma << ", equality rel gap " << worst_equality << ", min theorem rel gap "
    << worst_theorem;
  return {worst_lemma >= -1e-9 && worst_equality <= 1e-8 && worst_theorem >= -1e-9, s.str()};
}

Outcome ac9() {
  bool pass = true;
  double worst_E = 0.0, worst_stat = 0.0, spread = 0.0;
  std::vector<double> ratios;
  for (double A : {0.25, 1.0, 4.0, 16.0}) {
    const auto state = TwoBodyState::product_gaussian(A);
    const auto grid = default_grid(state);
    const auto r = bound_report(state, grid);
    worst_E = std::max(worst_E, std::abs(r.E_psi / (-0.5 * std::sqrt(2.0 * pi * A)) - 1.0));
    worst_stat = std::max(worst_stat, stationarity_residual(r.L, r.G, r.epsilon_star));
    for (double e : {0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0}) {
      const double rhs = bound_rhs(r.L, r.G, e);
      pass = pass && r.E_psi >= rhs && r.rhs_new >= rhs;
    }
    pass = pass && r.E_psi >= r.rhs_new;
    ratios.push_back(r.margin_ratio());
  }
  for (double q : ratios) spread = std::max(spread, std::abs(q / ratios.front() - 1.0));
  std::ostringstream s;
  s << "E max rel err " << worst_E << ", stationarity " << worst_stat << ", margin ratio " << ratios.front()
    << " spread " << spread << (pass ? "" : ", bound violated or eps* not tightest");
  return {pass && worst_E <= 1e-4 && worst_stat <= 1e-8 && spread <= 1e-2, s.str()};
}

Outcome ac10() {
  double worst = std::numeric_limits<double>::infinity();
  auto compare = [&](const DensityField& rho) {
    const double L = lp32_integral(rho), G = weizsacker_integral(rho);
    worst = std::min(worst, optimal_bound_rhs(L, G) - lsy_rhs(L));
  };
  for (double A : {0.25, 1.0, 4.0, 16.0}) {
    const auto state = TwoBodyState::product_gaussian(A);
    compare(reduced_density(state, default_grid(state)));
  }
  for (double N : {1.0, 2.0, 10.0, 100.0}) compare(gaussian_density(GaussianSpec::normalized(N, 1.0), {256, 12.0, {}}));
  std::ostringstream s;
  s << "min rhs_new - rhs_lsy " << worst;
  return {worst >= 0.0, s.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"AC1 constants", ac1},          {"AC2 half-plane lemma", ac2},  {"AC3 Gaussian closed forms", ac3},
      {"AC4 direct energy", ac4},      {"AC5 stability constants", ac5}, {"AC6 xi nonnegative", ac6},
      {"AC7 Lieb-Yau gap", ac7},        {"AC8 uncertainty principle", ac8}, {"AC9 bound certification", ac9},
      {"AC10 LSY comparison", ac10}};
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
