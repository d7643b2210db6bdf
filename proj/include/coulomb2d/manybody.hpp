#pragma once

// Two-particle states built from Gaussian orbitals, their indirect Coulomb
// energy E = <psi, 1/|x1 - x2| psi> - D(rho_psi, rho_psi), and the lower
// bounds -(1 + eps) beta L - 4 G / (beta eps) and -C_LSY L.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "coulomb2d/coulomb.hpp"
#include "coulomb2d/field2d.hpp"
#include "coulomb2d/numerics.hpp"
#include "coulomb2d/stability.hpp"

namespace c2d {

/// c exp(-A |x - center|^2 / 2), so that |phi|^2 decays like exp(-A r^2).
struct OrbitalComponent {
  double coefficient = 1.0;
  double A = 1.0;
  Point center{};
};

/// Real orbital phi = sum of Gaussian components with positive coefficients.
class Orbital {
 public:
  explicit Orbital(std::vector<OrbitalComponent> components) : components_(std::move(components)) {
    if (components_.empty()) throw std::invalid_argument("Orbital: needs at least one component");
    for (const auto& c : components_)
      if (!(c.coefficient > 0.0) || !(c.A > 0.0))
        throw std::invalid_argument("Orbital: coefficients and decays must be positive");
  }

  /// Normalized single Gaussian: |phi|^2 = (A / pi) exp(-A |x - center|^2).
  static Orbital gaussian(double A, Point center = {}) {
    return Orbital({{std::sqrt(A / pi), A, center}});
  }

  const std::vector<OrbitalComponent>& components() const { return components_; }

  double operator()(Point x) const {
    double s = 0.0;
    for (const auto& c : components_) {
      const double dx = x.x - c.center.x, dy = x.y - c.center.y;
      s += c.coefficient * std::exp(-0.5 * c.A * (dx * dx + dy * dy));
    }
    return s;
  }

  /// |phi|^2 expanded as a sum of Gaussians (one term per ordered pair).
  std::vector<GaussianSpec> density_terms() const {
    std::vector<GaussianSpec> out;
    for (const auto& p : components_)
      for (const auto& q : components_) {
        const double s = p.A + q.A;
        const Point center{(p.A * p.center.x + q.A * q.center.x) / s, (p.A * p.center.y + q.A * q.center.y) / s};
        const double d = distance(p.center, q.center);
        const double C = p.coefficient * q.coefficient * std::exp(-0.5 * p.A * q.A / s * d * d);
        out.push_back({C, 0.5 * s, center});
      }
    return out;
  }

  /// int |phi|^2
  double norm_squared() const {
    std::vector<double> m;
    for (const auto& g : density_terms()) m.push_back(g.mass());
    return pairwise_sum(m);
  }

  Orbital normalized() const {
    const double f = 1.0 / std::sqrt(norm_squared());
    auto c = components_;
    for (auto& x : c) x.coefficient *= f;
    return Orbital(std::move(c));
  }

  Orbital translated(Point offset) const {
    auto c = components_;
    for (auto& x : c) x.center = x.center + offset;
    return Orbital(std::move(c));
  }

 private:
  std::vector<OrbitalComponent> components_;
};

enum class Symmetry { symmetric, antisymmetric };

/// psi(x1, x2) = phi(x1) phi(x2). The antisymmetric tag is representable but
/// rejected by every evaluator.
struct TwoBodyState {
  Orbital orbital;
  Symmetry symmetry = Symmetry::symmetric;

  static constexpr double norm_tolerance = 1e-8;

  static TwoBodyState product_gaussian(double A, Point center = {}) { return {Orbital::gaussian(A, center)}; }

  void validate() const {
    if (symmetry != Symmetry::symmetric)
      throw std::domain_error("TwoBodyState: only symmetric product states are evaluated");
    const double norm = orbital.norm_squared();
    if (std::abs(norm - 1.0) > norm_tolerance)
      throw std::invalid_argument("TwoBodyState: orbital is not normalized (norm^2 = " + std::to_string(norm) + ")");
  }
};

/// Grid that resolves the state: n = 256, margin of 12 / sqrt(A_min) around
/// the orbital centers, which keeps the boundary ring below 1e-12 of the peak.
inline GridSpec default_grid(const TwoBodyState& state, int n = 256) {
  double a_min = std::numeric_limits<double>::infinity();
  double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x, lo_y = lo_x, hi_y = -lo_x;
  for (const auto& c : state.orbital.components()) {
    a_min = std::min(a_min, c.A);
    lo_x = std::min(lo_x, c.center.x);
    hi_x = std::max(hi_x, c.center.x);
    lo_y = std::min(lo_y, c.center.y);
    hi_y = std::max(hi_y, c.center.y);
  }
  const double span = std::max(hi_x - lo_x, hi_y - lo_y);
  return {n, span + 12.0 / std::sqrt(a_min), {0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y)}};
}

/// rho_psi = 2 |phi|^2 sampled on `grid`.
inline DensityField reduced_density(const TwoBodyState& state, const GridSpec& grid) {
  state.validate();
  auto terms = state.orbital.density_terms();
  for (auto& t : terms) t.C *= 2.0;
  return mixture_density(terms, grid);
}

namespace detail {

/// exp(-x) I0(x) for x >= 0, asymptotic series where I0 would overflow.
inline double scaled_bessel_i0(double x) {
  if (x < 500.0) return std::exp(-x) * std::cyl_bessel_i(0.0, x);
  const double t = 1.0 / (8.0 * x);
  return (1.0 + t * (1.0 + t * (4.5 + t * 37.5))) / std::sqrt(2.0 * pi * x);
}

/// Coulomb interaction of two unit-mass Gaussians with decays A1, A2 whose
/// centers are d apart: sqrt(pi A) e^{-A d^2/2} I0(A d^2/2), A = A1 A2 / (A1 + A2).
inline double gaussian_pair_interaction(double A1, double A2, double d) {
  const double A = A1 * A2 / (A1 + A2);
  return std::sqrt(pi * A) * scaled_bessel_i0(0.5 * A * d * d);
}

}  // namespace detail

/// D(|phi|^2, |phi|^2) from the Gaussian expansion of |phi|^2.
inline double orbital_self_energy(const Orbital& phi) {
  const auto terms = phi.density_terms();
  std::vector<double> t;
  for (const auto& p : terms)
    for (const auto& q : terms)
      t.push_back(p.mass() * q.mass() * detail::gaussian_pair_interaction(p.A, q.A, distance(p.center, q.center)));
  return 0.5 * pairwise_sum(t);
}

/// <psi, 1/|x1 - x2| psi> through the product identity 2 D(|phi|^2, |phi|^2).
inline double pair_repulsion_identity(const TwoBodyState& state) {
  state.validate();
  return 2.0 * orbital_self_energy(state.orbital);
}

/// <psi, 1/|x1 - x2| psi> by tensor quadrature in the relative coordinates
/// X = (x1 + x2)/2, r = x1 - x2. Writing d^2 r / |r| = ds d(theta) with
/// s in R and theta in [0, pi) removes the singularity; X and s use
/// Gauss-Hermite rules scaled to the widest component, theta the trapezoid
/// rule (the integrand is pi-periodic).
inline double pair_repulsion_quadrature(const TwoBodyState& state, int order = 48) {
  state.validate();
  if (order < 40) throw std::invalid_argument("pair_repulsion_quadrature: order must be at least 40");
  const auto& comps = state.orbital.components();
  double a_min = std::numeric_limits<double>::infinity();
  Point center{};
  double weight_sum = 0.0;
  for (const auto& c : comps) {
    a_min = std::min(a_min, c.A);
    center = center + c.coefficient * c.center;
    weight_sum += c.coefficient;
  }
  center = (1.0 / weight_sum) * center;

  // |phi(x1)|^2 |phi(x2)|^2 for a centered Gaussian is exp(-A (2|X|^2 + |r|^2/2)).
  const double sx = 1.0 / std::sqrt(2.0 * a_min);
  const double ss = std::sqrt(2.0 / a_min);
  const auto gh = gauss_hermite(order);
  const int n_theta = order;

  const Orbital& phi = state.orbital;
  std::vector<double> per_theta(n_theta);
  std::vector<double> inner(static_cast<std::size_t>(order) * order * order);
  for (int t = 0; t < n_theta; ++t) {
    const double theta = pi * t / n_theta;
    const Point e{std::cos(theta), std::sin(theta)};
    std::size_t k = 0;
    for (int a = 0; a < order; ++a)
      for (int b = 0; b < order; ++b) {
        const Point X = center + Point{sx * gh.nodes[a], sx * gh.nodes[b]};
        const double wx = gh.weights[a] * gh.weights[b] * std::exp(gh.nodes[a] * gh.nodes[a] + gh.nodes[b] * gh.nodes[b]);
        for (int c = 0; c < order; ++c) {
          const double s = ss * gh.nodes[c];
          const Point half = (0.5 * s) * e;
          const double p1 = phi(X + half), p2 = phi(X - half);
          const double ws = gh.weights[c] * std::exp(gh.nodes[c] * gh.nodes[c]);
          inner[k++] = wx * ws * p1 * p1 * p2 * p2;
        }
      }
    per_theta[t] = pairwise_sum(inner);
  }
  return pairwise_sum(per_theta) * (pi / n_theta) * sx * sx * ss;
}

/// Indirect energy with the pair term from `pair` and D(rho_psi) on `grid`.
inline double indirect_energy(const TwoBodyState& state, const GridSpec& grid, double pair) {
  return pair - direct_energy(reduced_density(state, grid));
}

/// E(psi) = <psi, 1/|x1 - x2| psi> - D(rho_psi, rho_psi): quadrature pair
/// term, grid D.
inline double indirect_energy(const TwoBodyState& state, const GridSpec& grid) {
  return indirect_energy(state, grid, pair_repulsion_quadrature(state));
}

/// -(1 + eps) beta L - 4 G / (beta eps)
inline double bound_rhs(double L, double G, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("bound_rhs: epsilon must be positive");
  const double beta = beta_constant();
  return -(1.0 + epsilon) * beta * L - 4.0 * G / (beta * epsilon);
}

inline double bound_rhs(const DensityField& rho, double epsilon) {
  return bound_rhs(lp32_integral(rho), weizsacker_integral(rho), epsilon);
}

/// eps* = (2 / beta) sqrt(G / L). G = 0 gives 0: the bound then approaches
/// -beta L without attaining it.
inline double optimal_epsilon(double L, double G) {
  if (!(L > 0.0)) throw std::invalid_argument("optimal_epsilon: L must be positive");
  return 2.0 / beta_constant() * std::sqrt(G / L);
}

inline double optimal_epsilon(const DensityField& rho) {
  return optimal_epsilon(lp32_integral(rho), weizsacker_integral(rho));
}

/// |d/d eps of the bound| relative to beta L at `epsilon`.
inline double stationarity_residual(double L, double G, double epsilon) {
  const double beta = beta_constant();
  return std::abs(beta * L - 4.0 * G / (beta * epsilon * epsilon)) / (beta * L);
}

/// -(beta L + 4 sqrt(G L)), the bound at eps*.
inline double optimal_bound_rhs(double L, double G) { return -(beta_constant() * L + 4.0 * std::sqrt(G * L)); }

/// -C_LSY L
inline double lsy_rhs(double L) { return -lsy_constant() * L; }
inline double lsy_rhs(const DensityField& rho) { return lsy_rhs(lp32_integral(rho)); }

struct BoundReport {
  double E_psi = 0.0;
  double L = 0.0;
  double G = 0.0;
  double epsilon_star = 0.0;
  double rhs_new = 0.0;
  double rhs_lsy = 0.0;

  double margin_new() const { return E_psi - rhs_new; }
  double margin_lsy() const { return E_psi - rhs_lsy; }
  /// (E - rhs_new) / |rhs_new|; both scale the same way under dilation.
  double margin_ratio() const { return margin_new() / std::abs(rhs_new); }
  bool holds() const { return rhs_new <= E_psi && rhs_lsy <= E_psi; }
};

inline BoundReport bound_report(const TwoBodyState& state, const GridSpec& grid) {
  const auto rho = reduced_density(state, grid);
  BoundReport r;
  r.E_psi = pair_repulsion_quadrature(state) - direct_energy(rho);
  r.L = lp32_integral(rho);
  r.G = weizsacker_integral(rho);
  r.epsilon_star = optimal_epsilon(r.L, r.G);
  r.rhs_new = r.epsilon_star > 0.0 ? bound_rhs(r.L, r.G, r.epsilon_star) : -beta_constant() * r.L;
  r.rhs_lsy = lsy_rhs(r.L);
  return r;
}

}  // namespace c2d
