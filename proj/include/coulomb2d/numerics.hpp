#pragma once

// Small numerical toolbox shared by every module: deterministic reductions,
// bracketing solvers and fixed/adaptive quadrature rules.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace c2d {

inline constexpr double pi = std::numbers::pi;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Pairwise (cascade) summation. The reduction tree depends only on the
/// length of the input, so results are bit-reproducible.
inline double pairwise_sum(std::span<const double> v) {
  constexpr std::size_t block = 32;
  if (v.size() <= block) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

/// Bisection on a sign change of `f` over [lo, hi], iterated until the
/// bracket cannot be split any further in floating point.
template <class F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::invalid_argument("bisect: interval does not bracket a root");
  for (;;) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return std::abs(flo) <= std::abs(fhi) ? lo : hi;
}

/// Golden-section minimization of a unimodal function on [lo, hi].
template <class F>
double golden_section_minimize(F&& f, double lo, double hi, double rel_tol = 1e-12) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  auto f1 = f(x1);  // f may return a wider type than double
  auto f2 = f(x2);
  while (hi - lo > rel_tol * (std::abs(lo) + std::abs(hi))) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  return 0.5 * (lo + hi);
}

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the weight exp(-x^2), Newton iteration on the
/// orthonormal Hermite recurrence.
inline QuadratureRule gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: order must be positive");
  QuadratureRule rule{std::vector<double>(n), std::vector<double>(n)};
  const double pim4 = std::pow(pi, -0.25);
  double z = 0.0;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * rule.nodes[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * rule.nodes[1];
    else
      z = 2.0 * z - rule.nodes[i - 2];
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    rule.weights[i] = 2.0 / (pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  // Ascending order.
  std::reverse(rule.nodes.begin(), rule.nodes.end());
  std::reverse(rule.weights.begin(), rule.weights.end());
  return rule;
}

/// Chebyshev-Lobatto points mapped to [0, R] (r_0 = 0, r_N = R) with
/// Clenshaw-Curtis weights and the spectral differentiation matrix.
struct ChebyshevGrid {
  double radius = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> diff;  // row-major (m x m), d/dr

  std::size_t size() const { return nodes.size(); }

  std::vector<double> differentiate(std::span<const double> f) const {
    const std::size_t m = size();
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += diff[i * m + j] * f[j];
      out[i] = s;
    }
    return out;
  }

  double integrate(std::span<const double> f) const {
    std::vector<double> t(size());
    for (std::size_t i = 0; i < size(); ++i) t[i] = weights[i] * f[i];
    return pairwise_sum(t);
  }
};

inline ChebyshevGrid chebyshev_grid(double radius, int points) {
  if (points < 3) throw std::invalid_argument("chebyshev_grid: need at least 3 points");
  if (!(radius > 0.0)) throw std::invalid_argument("chebyshev_grid: radius must be positive");
  const int n = points - 1;
  ChebyshevGrid g;
  g.radius = radius;
  g.nodes.resize(points);
  g.weights.assign(points, 0.0);
  std::vector<double> x(points);
  for (int k = 0; k <= n; ++k) {
    x[k] = std::cos(pi * k / n);
    g.nodes[k] = 0.5 * radius * (1.0 - x[k]);
  }
  g.nodes.front() = 0.0;
  g.nodes.back() = radius;

  // Clenshaw-Curtis weights on [-1, 1].
  std::vector<double> v(points - 2, 1.0);
  if (n % 2 == 0) {
    g.weights[0] = g.weights[n] = 1.0 / (static_cast<double>(n) * n - 1.0);
    for (int k = 1; k < n / 2; ++k)
      for (int i = 1; i < n; ++i) v[i - 1] -= 2.0 * std::cos(2.0 * k * pi * i / n) / (4.0 * k * k - 1.0);
    for (int i = 1; i < n; ++i) v[i - 1] -= std::cos(pi * i) / (static_cast<double>(n) * n - 1.0);
  } else {
    g.weights[0] = g.weights[n] = 1.0 / (static_cast<double>(n) * n);
    for (int k = 1; k <= (n - 1) / 2; ++k)
      for (int i = 1; i < n; ++i) v[i - 1] -= 2.0 * std::cos(2.0 * k * pi * i / n) / (4.0 * k * k - 1.0);
  }
  for (int i = 1; i < n; ++i) g.weights[i] = 2.0 * v[i - 1] / n;
  for (double& w : g.weights) w *= 0.5 * radius;

  // Differentiation matrix on x, then chain rule dr = -(R/2) dx.
  g.diff.assign(static_cast<std::size_t>(points) * points, 0.0);
  auto c = [n](int i) { return ((i == 0 || i == n) ? 2.0 : 1.0) * ((i % 2) ? -1.0 : 1.0); };
  for (int i = 0; i <= n; ++i) {
    double row = 0.0;
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      const double d = c(i) / c(j) / (x[i] - x[j]);
      g.diff[i * points + j] = d;
      row += d;
    }
    g.diff[i * points + i] = -row;
  }
  const double chain = -2.0 / radius;
  for (double& d : g.diff) d *= chain;
  return g;
}

/// Adaptive 15-point Gauss-Kronrod integration (either limit may be infinite).
template <class F>
double integrate_adaptive(F&& f, double a, double b, double tol = 1e-11, unsigned max_depth = 15) {
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(std::forward<F>(f), a, b,
                                                                      max_depth, tol);
}

/// Deterministic uniform generator: splitmix64 with a fixed bit-to-double map,
/// identical on every standard library.
class TrialRng {
 public:
  explicit TrialRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::uint64_t state_;
};

}  // namespace c2d
