#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "coulomb2d/coulomb.hpp"
#include "coulomb2d/field2d.hpp"

using namespace c2d;

namespace {

// D for a Gaussian of charge N and decay A, from the radial Fourier
// reduction D = (1 / 4 pi) int_0^inf |rho^(k)|^2 2 pi / k k dk with
// rho^(k) = N exp(-k^2 / 4A), evaluated numerically here.
double gaussian_D_oracle(double N, double A) {
  return 0.5 * integrate_adaptive([&](double k) { return N * N * std::exp(-k * k / (2.0 * A)); }, 0.0, INFINITY);
}

DensityField gaussian(double N, double A, int n, double extent, Point center = {}) {
  return gaussian_density(GaussianSpec::normalized(N, A, center), {n, extent, {}});
}

std::vector<GaussianSpec> random_smooth_mixture(TrialRng& rng) {
  std::vector<GaussianSpec> comps;
  const int m = rng.integer(1, 4);
  for (int k = 0; k < m; ++k)
    comps.push_back(GaussianSpec::normalized(rng.uniform(0.2, 2.0), rng.uniform(0.6, 2.0),
                                             {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)}));
  return comps;
}

}  // namespace

TEST(GaussianOracle, MatchesClosedForm) {
  for (double A : {0.5, 1.0, 4.0}) EXPECT_NEAR(gaussian_D_oracle(2.0, A), std::sqrt(2.0 * pi * A), 1e-10);
}

TEST(CellConstants, MatchClosedForms) {
  const auto& c = cell_constants();
  const double l = std::log(1.0 + std::sqrt(2.0));
  EXPECT_NEAR(c.c_nuc / (4.0 * l), 1.0, 1e-6);
  EXPECT_NEAR(c.c_self / (4.0 * l - 4.0 / 3.0 * (std::sqrt(2.0) - 1.0)), 1.0, 1e-6);
  EXPECT_NEAR(c.c_nuc, 4.0 * l, 1e-8);
  // -Z(1/2) for the square lattice, Z(s) = 4 zeta(s) beta(s).
  EXPECT_NEAR(c.c_trap, -4.0 * -1.4603545088095868 * 0.6676914571896092, 1e-8);
}

TEST(CellConstants, QuasiMonteCarloSanity) {
  // Mean of 1/|X - Y| on the unit square with a 2D Halton-type lattice in
  // each point; the singular integrand limits QMC to a few digits.
  auto radical = [](unsigned i, unsigned base) {
    double f = 1.0, r = 0.0;
    for (; i > 0; i /= base) {
      f /= base;
      r += f * (i % base);
    }
    return r;
  };
  const unsigned pairs = 1000000;
  std::vector<double> t(pairs);
  for (unsigned k = 0; k < pairs; ++k) {
    const double dx = radical(k + 1, 2) - radical(k + 1, 3);
    const double dy = radical(k + 1, 5) - radical(k + 1, 7);
    t[k] = 1.0 / std::hypot(dx, dy);
  }
  EXPECT_NEAR(pairwise_sum(t) / pairs / cell_constants().c_self, 1.0, 2e-2);
}

TEST(CellConstants, ScaleWithCellSide) {
  // int over a square of side h of 1/|x| = c_nuc h.
  const GridSpec g{8, 8.0 * 0.37, {}};
  const Point center = g.cell_center(3, 4);
  EXPECT_NEAR(cell_inverse_distance_integral(g, 3, 4, center), cell_constants().c_nuc * 0.37, 1e-12);
}

TEST(DirectEnergy, ZeroField) {
  const auto z = DensityField::zeros({32, 10.0, {}});
  EXPECT_EQ(direct_energy_reference(z), 0.0);
  EXPECT_EQ(direct_energy_spectral(z), 0.0);
}

TEST(DirectEnergy, GaussianReferenceAt128) {
  const double N = 2.0, A = 1.0;
  const auto rho = gaussian(N, A, 128, 12.0);
  EXPECT_NEAR(direct_energy_reference(rho) / gaussian_D_oracle(N, A), 1.0, 1e-2);
}

TEST(DirectEnergy, GaussianSpectralAt256) {
  for (double A : {0.5, 1.0, 3.0}) {
    const auto rho = gaussian(1.5, A, 256, 12.0 / std::sqrt(A));
    EXPECT_NEAR(direct_energy_spectral(rho) / gaussian_D_oracle(1.5, A), 1.0, 1e-2) << A;
  }
}

TEST(DirectEnergy, SpectralMatchesReferenceOnRandom64Fields) {
  TrialRng rng(5);
  for (int t = 0; t < 8; ++t) {
    const auto rho = mixture_density(random_smooth_mixture(rng), {64, 20.0, {}});
    const double ref = direct_energy_reference(rho), spec = direct_energy_spectral(rho);
    EXPECT_NEAR(spec / ref, 1.0, 1e-3) << "trial " << t;
  }
}

TEST(DirectEnergy, ReferenceConvergesAtLeastThreeHalvesOrder) {
  const double N = 1.0, A = 1.0, exact = gaussian_D_oracle(N, A);
  std::vector<double> err;
  for (int n : {16, 32, 64}) err.push_back(std::abs(direct_energy_reference(gaussian(N, A, n, 13.0)) - exact));
  for (std::size_t k = 1; k < err.size(); ++k) EXPECT_GE(std::log2(err[k - 1] / err[k]), 1.5);
}

TEST(DirectEnergy, UniformCellRuleIsFirstOrder) {
  const double N = 1.0, A = 1.0, exact = gaussian_D_oracle(N, A);
  const ReferenceOptions uniform{SelfCellRule::uniform_cell};
  const double e32 = std::abs(direct_energy_reference(gaussian(N, A, 32, 13.0), uniform) - exact);
  const double e64 = std::abs(direct_energy_reference(gaussian(N, A, 64, 13.0), uniform) - exact);
  const double order = std::log2(e32 / e64);
  EXPECT_GT(order, 0.8);
  EXPECT_LT(order, 1.2);
}

TEST(DirectEnergy, ReferenceCapRespected) {
  const auto rho = gaussian(1.0, 1.0, 256, 12.0);
  EXPECT_THROW(direct_energy_reference(rho), std::invalid_argument);
  EXPECT_NO_THROW(direct_energy(rho));
}

TEST(DirectEnergy, QuadraticInScale) {
  const auto rho = gaussian(1.0, 1.0, 64, 12.0, {0.2, -0.1});
  const double lam = 3.0;
  EXPECT_NEAR(direct_energy_reference(rho.scaled(lam)), lam * lam * direct_energy_reference(rho),
              1e-13 * lam * lam * direct_energy_reference(rho));
  EXPECT_NEAR(direct_energy_spectral(rho.scaled(lam)), lam * lam * direct_energy_spectral(rho),
              1e-13 * lam * lam * direct_energy_spectral(rho));
}

TEST(DirectEnergy, DilationScalesLinearly) {
  const auto rho = gaussian(1.0, 1.0, 128, 12.0, {0.3, 0.1});
  const double D = direct_energy(rho);
  for (double alpha : {0.5, 2.0, 3.0}) EXPECT_NEAR(direct_energy(dilate(rho, alpha)) / (alpha * D), 1.0, 1e-2);
}

TEST(DirectEnergy, FarSeparatedCopiesGiveMonopoleCrossTerm) {
  const double N1 = 1.0, N2 = 0.7, d = 16.0;
  const GridSpec grid{128, 32.0, {}};
  const auto r1 = gaussian_density(GaussianSpec::normalized(N1, 2.0, {-d / 2, 0.0}), grid);
  const auto r2 = gaussian_density(GaussianSpec::normalized(N2, 2.0, {d / 2, 0.0}), grid);
  const double cross = direct_energy(r1 + r2) - direct_energy(r1) - direct_energy(r2);
  // D(rho1 + rho2) = D1 + D2 + int rho1 rho2 / |x - y|, which tends to N1 N2 / d.
  EXPECT_NEAR(cross / (N1 * N2 / d), 1.0, 2e-2);
}

TEST(DirectEnergy, ReferenceDeterministicAcrossThreadCounts) {
  TrialRng rng(2);
  const auto rho = mixture_density(random_smooth_mixture(rng), {64, 20.0, {}});
  const double one = direct_energy_reference(rho, {SelfCellRule::corrected_trapezoid, 128, 1});
  for (unsigned threads : {2u, 3u, 8u})
    EXPECT_EQ(direct_energy_reference(rho, {SelfCellRule::corrected_trapezoid, 128, threads}), one);
  EXPECT_EQ(direct_energy_spectral(rho), direct_energy_spectral(rho));
}

TEST(TruncatedKernel, IntegralOfJ0MatchesQuadrature) {
  for (double s : {0.0, 0.3, 1.0, 5.0, 17.5, 80.0}) {
    const double q = s == 0.0 ? 0.0 : integrate_adaptive([](double t) { return std::cyl_bessel_j(0.0, t); }, 0.0, s, 1e-13);
    EXPECT_NEAR(detail::integral_j0(s), q, 1e-11) << "s = " << s;
  }
}

TEST(TruncatedKernel, PotentialMatchesPointChargeFarAway) {
  const GridSpec grid{128, 24.0, {}};
  const auto rho = gaussian_density(GaussianSpec::normalized(1.0, 3.0, {-8.0, 0.0}), grid);
  const TruncatedKernelTransform tr(rho);
  // Potential of a Gaussian at distance d is 1/d up to exp(-A d^2) corrections
  // and the O(1/(A d^3)) quadrupole-free tail; d = 16 makes both negligible.
  EXPECT_NEAR(tr.potential_at({8.0, 0.0}) * 16.0, 1.0, 2e-3);
}

TEST(ExternalEnergy, ZeroFieldAndPointChargeLimit) {
  const NucleiConfig nuc{{{0.0, 0.0}}, 2.0};
  EXPECT_EQ(external_energy(DensityField::zeros({32, 10.0, {}}), nuc), 0.0);
  const double d = 3.0;
  const auto narrow = gaussian_density(GaussianSpec::normalized(1.0, 40.0, {d, 0.0}), {128, 8.0, {}});
  EXPECT_NEAR(external_energy(narrow, nuc) / (2.0 / d), 1.0, 1e-2);
  EXPECT_NEAR(external_energy_spectral(narrow, nuc) / (2.0 / d), 1.0, 1e-2);
}

TEST(ExternalEnergy, StackedNucleiAreLinear) {
  const auto rho = gaussian(1.0, 2.0, 64, 16.0, {-4.0, 0.0});
  const NucleiConfig one{{{5.0, 5.0}}, 1.0};
  const NucleiConfig three{{{5.0, 5.0}, {5.0, 5.0 + 1e-9}, {5.0 + 1e-9, 5.0}}, 1.0};
  EXPECT_NEAR(external_energy(rho, three) / (3.0 * external_energy(rho, one)), 1.0, 1e-6);
}

TEST(ExternalEnergy, NucleusInsideSupportUsesCellAverage) {
  // A nucleus at the center of a Gaussian of charge N, decay A:
  // int rho / |x| = N sqrt(pi A).
  const double N = 1.0, A = 1.0;
  const NucleiConfig nuc{{{0.0, 0.0}}, 1.0};
  const auto rho = gaussian(N, A, 128, 12.0);
  EXPECT_NEAR(external_energy(rho, nuc) / (N * std::sqrt(pi * A)), 1.0, 5e-3);
  EXPECT_NEAR(external_energy_spectral(rho, nuc) / (N * std::sqrt(pi * A)), 1.0, 1e-8);
}

TEST(ExternalEnergy, NucleusOutsideDomainRejected) {
  const auto rho = gaussian(1.0, 1.0, 32, 12.0);
  EXPECT_THROW(external_energy(rho, NucleiConfig{{{20.0, 0.0}}, 1.0}), std::invalid_argument);
}

TEST(NuclearRepulsion, SmallConfigurations) {
  EXPECT_EQ(nuclear_repulsion(NucleiConfig{{{0.0, 0.0}}, 3.0}), 0.0);
  EXPECT_DOUBLE_EQ(nuclear_repulsion(NucleiConfig{{{0.0, 0.0}, {2.0, 0.0}}, 1.0}), 0.5);
  const double s = 1.7, z = 1.3;
  const NucleiConfig tri{{{0.0, 0.0}, {s, 0.0}, {s / 2, s * std::sqrt(3.0) / 2}}, z};
  EXPECT_NEAR(nuclear_repulsion(tri), 3.0 * z * z / s, 1e-14);
  EXPECT_THROW(nuclear_repulsion(NucleiConfig{{{1.0, 1.0}, {1.0, 1.0}}, 1.0}), std::invalid_argument);
}

TEST(Energies, TranslationInvariantUnderWholeCellShifts) {
  const GridSpec grid{64, 16.0, {}};
  const auto rho = gaussian_density(GaussianSpec::normalized(1.2, 1.0, {0.4, -0.3}), grid);
  const NucleiConfig nuc{{{-1.1, 0.6}, {1.3, 0.2}}, 0.8};
  const double h = grid.spacing();
  const Point shift{5 * h, -3 * h};
  const auto moved = rho.translated(shift);
  const auto moved_nuc = nuc.translated(shift);
  EXPECT_NEAR(direct_energy(moved) / direct_energy(rho), 1.0, 1e-6);
  EXPECT_NEAR(external_energy(moved, moved_nuc) / external_energy(rho, nuc), 1.0, 1e-6);
  EXPECT_NEAR(external_energy_spectral(moved, moved_nuc) / external_energy_spectral(rho, nuc), 1.0, 1e-6);
  EXPECT_NEAR(nuclear_repulsion(moved_nuc) / nuclear_repulsion(nuc), 1.0, 1e-6);
}
