#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "coulomb2d/numerics.hpp"

using namespace c2d;

TEST(PairwiseSum, MatchesExactSumOfIntegers) {
  std::vector<double> v(1000);
  std::iota(v.begin(), v.end(), 1.0);
  EXPECT_EQ(pairwise_sum(v), 500500.0);
  EXPECT_EQ(pairwise_sum(std::vector<double>{}), 0.0);
}

TEST(PairwiseSum, BeatsNaiveSummationOnSmallIncrements) {
  std::vector<double> v(1 << 20, 0.1);
  const double exact = 0.1 * (1 << 20);
  double naive = 0.0;
  for (double x : v) naive += x;
  EXPECT_LE(std::abs(pairwise_sum(v) - exact), std::abs(naive - exact));
  EXPECT_NEAR(pairwise_sum(v), exact, 1e-9);
}

TEST(Bisect, FindsSqrtTwoToMachinePrecision) {
  const double r = bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0);
  EXPECT_NEAR(r, std::sqrt(2.0), 4e-16);
}

TEST(Bisect, RejectsIntervalWithoutSignChange) {
  EXPECT_THROW(bisect([](double x) { return x * x + 1.0; }, -1.0, 1.0), std::invalid_argument);
}

TEST(GoldenSection, FindsParabolaMinimum) {
  const double x = golden_section_minimize([](double t) { return (t - 1.3) * (t - 1.3); }, 0.0, 5.0);
  EXPECT_NEAR(x, 1.3, 1e-7);
}

TEST(GoldenSection, WideReturnTypeSharpensTheMinimizer) {
  auto f = [](double t) {
    const long double d = static_cast<long double>(t) - 0.7L;
    return 1.0L + d * d;
  };
  EXPECT_NEAR(golden_section_minimize(f, 0.0, 2.0), 0.7, 1e-9);
}

TEST(GaussHermite, IntegratesMonomialsExactly) {
  const auto rule = gauss_hermite(40);
  for (int k = 0; k <= 20; k += 2) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * std::pow(rule.nodes[i], k);
    // int x^k e^{-x^2} = Gamma((k+1)/2)
    EXPECT_NEAR(s / std::tgamma((k + 1) / 2.0), 1.0, 1e-12) << "k = " << k;
  }
}

TEST(GaussHermite, NodesAscendAndAreSymmetric) {
  const auto rule = gauss_hermite(41);
  for (std::size_t i = 1; i < rule.nodes.size(); ++i) EXPECT_LT(rule.nodes[i - 1], rule.nodes[i]);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    EXPECT_NEAR(rule.nodes[i], -rule.nodes[rule.nodes.size() - 1 - i], 1e-13);
    EXPECT_GT(rule.weights[i], 0.0);
  }
  EXPECT_NEAR(rule.nodes[20], 0.0, 1e-14);
}

TEST(ChebyshevGrid, EndpointsAndWeights) {
  const auto g = chebyshev_grid(2.5, 65);
  EXPECT_EQ(g.nodes.front(), 0.0);
  EXPECT_EQ(g.nodes.back(), 2.5);
  EXPECT_NEAR(std::accumulate(g.weights.begin(), g.weights.end(), 0.0), 2.5, 1e-14);
}

TEST(ChebyshevGrid, SpectralDifferentiationAndIntegration) {
  for (int points : {64, 65}) {
    const auto g = chebyshev_grid(2.0, points);
    std::vector<double> f, df;
    for (double r : g.nodes) {
      f.push_back(std::exp(-r * r) * std::cos(3.0 * r));
      df.push_back(-std::exp(-r * r) * (2.0 * r * std::cos(3.0 * r) + 3.0 * std::sin(3.0 * r)));
    }
    const auto d = g.differentiate(f);
    for (std::size_t k = 0; k < f.size(); ++k) EXPECT_NEAR(d[k], df[k], 1e-11);
    std::vector<double> poly;
    for (double r : g.nodes) poly.push_back(r * r * r);
    EXPECT_NEAR(g.integrate(poly), 4.0, 1e-13);
  }
}

TEST(IntegrateAdaptive, HandlesInfiniteRangeAndEndpointCusp) {
  EXPECT_NEAR(integrate_adaptive([](double x) { return std::exp(-x * x); }, 0.0, INFINITY), std::sqrt(pi) / 2, 1e-12);
  // A bounded integrand with an unbounded derivative at the endpoint.
  EXPECT_NEAR(integrate_adaptive([](double x) { return std::sqrt(x); }, 0.0, 1.0), 2.0 / 3.0, 1e-10);
}

TEST(TrialRng, DeterministicAndInRange) {
  TrialRng a(7), b(7), c(8);
  bool differs = false;
  for (int k = 0; k < 1000; ++k) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    differs = differs || x != c.uniform();
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
    const int i = a.integer(2, 6);
    b.integer(2, 6);
    EXPECT_GE(i, 2);
    EXPECT_LE(i, 6);
    const double l = a.log_uniform(0.1, 10.0);
    b.log_uniform(0.1, 10.0);
    EXPECT_GE(l, 0.1);
    EXPECT_LE(l, 10.0);
  }
  EXPECT_TRUE(differs);
}
