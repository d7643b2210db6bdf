#pragma once

// Radial checks of the Coulomb uncertainty principle on a disk D_R:
//
//   |int (2u + r u') f^4| <= 4 (int |grad f|^2)^{1/2} (int u^2 r^2 f^6)^{1/2}
//   a^2 int |grad f|^2 + b^2 int f^6 >= a b int (1/(2r) - 1/R) f^4
//
// All integrals are 2 pi int_0^R (...) r dr on a Chebyshev-Lobatto grid.

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "coulomb2d/numerics.hpp"

namespace c2d {

using RadialGridPtr = std::shared_ptr<const ChebyshevGrid>;

inline RadialGridPtr make_radial_grid(double radius, int points = 96) {
  if (points < 64) throw std::invalid_argument("radial grid needs at least 64 points");
  return std::make_shared<const ChebyshevGrid>(chebyshev_grid(radius, points));
}

/// Profile f(|x|) sampled on the radial nodes.
struct RadialFunction {
  RadialGridPtr grid;
  std::vector<double> values;

  double radius() const { return grid->radius; }

  static RadialFunction sample(RadialGridPtr grid, const std::function<double(double)>& f) {
    RadialFunction out{grid, std::vector<double>(grid->size())};
    for (std::size_t k = 0; k < grid->size(); ++k) {
      out.values[k] = f(grid->nodes[k]);
      if (!std::isfinite(out.values[k])) throw std::invalid_argument("RadialFunction: non-finite sample");
    }
    return out;
  }
};

/// A weight u(|x|) enters only through r u, r (2u + r u') and the moment
/// int_0^r s u(s) ds; those are stored on the nodes so singular choices such
/// as u = 1/r - 1/R can be registered analytically.
struct RadialWeight {
  RadialGridPtr grid;
  std::vector<double> r_u;
  std::vector<double> r_divergence;
  std::vector<double> moment;

  bool vanishes_at_boundary() const {
    double scale = 0.0;
    for (double v : r_u) scale = std::max(scale, std::abs(v));
    return std::abs(r_u.back()) <= 1e-12 * std::max(scale, 1e-300);
  }

  /// u = 1/r - 1/R: r u = 1 - r/R, r(2u + r u') = 1 - 2r/R, moment r - r^2/(2R).
  static RadialWeight coulomb(RadialGridPtr grid) {
    const double R = grid->radius;
    RadialWeight w{grid, {}, {}, {}};
    for (double r : grid->nodes) {
      w.r_u.push_back(1.0 - r / R);
      w.r_divergence.push_back(1.0 - 2.0 * r / R);
      w.moment.push_back(r - r * r / (2.0 * R));
    }
    return w;
  }

  /// Smooth u given pointwise; u' by spectral differentiation, the moment by
  /// adaptive quadrature.
  static RadialWeight smooth(RadialGridPtr grid, const std::function<double(double)>& u) {
    RadialWeight w{grid, {}, {}, {}};
    std::vector<double> samples;
    for (double r : grid->nodes) samples.push_back(u(r));
    const auto du = grid->differentiate(samples);
    for (std::size_t k = 0; k < grid->size(); ++k) {
      const double r = grid->nodes[k];
      w.r_u.push_back(r * samples[k]);
      w.r_divergence.push_back(r * (2.0 * samples[k] + r * du[k]));
      w.moment.push_back(r == 0.0 ? 0.0 : integrate_adaptive([&u](double s) { return s * u(s); }, 0.0, r));
    }
    return w;
  }
};

namespace detail {

inline void require_same_grid(const RadialFunction& f, const RadialWeight& u) {
  if (f.grid != u.grid) throw std::invalid_argument("radial: function and weight live on different grids");
  if (!u.vanishes_at_boundary()) throw std::domain_error("radial: the weight must satisfy u(R) = 0");
}

}  // namespace detail

/// int_{D_R} |grad f|^2
inline double radial_dirichlet(const RadialFunction& f) {
  const auto& g = *f.grid;
  const auto df = g.differentiate(f.values);
  std::vector<double> t(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) t[k] = df[k] * df[k] * g.nodes[k];
  return 2.0 * pi * g.integrate(t);
}

/// int_{D_R} f^p
inline double radial_power(const RadialFunction& f, int p) {
  const auto& g = *f.grid;
  std::vector<double> t(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) t[k] = std::pow(f.values[k], p) * g.nodes[k];
  return 2.0 * pi * g.integrate(t);
}

/// |int_{D_R} (2u + |x| u') f^4|
inline double lemma_lhs(const RadialFunction& f, const RadialWeight& u) {
  detail::require_same_grid(f, u);
  const auto& g = *f.grid;
  std::vector<double> t(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) t[k] = u.r_divergence[k] * std::pow(f.values[k], 4);
  return std::abs(2.0 * pi * g.integrate(t));
}

/// int_{D_R} u^2 |x|^2 f^6
inline double lemma_weighted_sextic(const RadialFunction& f, const RadialWeight& u) {
  const auto& g = *f.grid;
  std::vector<double> t(g.size());
  for (std::size_t k = 0; k < g.size(); ++k)
    t[k] = u.r_u[k] * u.r_u[k] * std::pow(f.values[k], 6) * g.nodes[k];
  return 2.0 * pi * g.integrate(t);
}

/// 4 (int |grad f|^2)^{1/2} (int u^2 |x|^2 f^6)^{1/2}
inline double lemma_rhs(const RadialFunction& f, const RadialWeight& u) {
  detail::require_same_grid(f, u);
  return 4.0 * std::sqrt(radial_dirichlet(f)) * std::sqrt(lemma_weighted_sextic(f, u));
}

/// int_{D_R} (1/(2|x|) - 1/R) f^4
inline double coulomb_quartic(const RadialFunction& f) {
  const auto& g = *f.grid;
  std::vector<double> t(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) t[k] = (0.5 - g.nodes[k] / g.radius) * std::pow(f.values[k], 4);
  return 2.0 * pi * g.integrate(t);
}

struct UncertaintyTerms {
  double dirichlet = 0.0;  ///< int |grad f|^2
  double sextic = 0.0;     ///< int f^6
  double coulomb = 0.0;    ///< int (1/(2|x|) - 1/R) f^4

  double lhs(double a, double b) const { return a * a * dirichlet + b * b * sextic; }
  double rhs(double a, double b) const { return a * b * coulomb; }
  double gap(double a, double b) const { return lhs(a, b) - rhs(a, b); }
};

inline UncertaintyTerms uncertainty_terms(const RadialFunction& f) {
  return {radial_dirichlet(f), radial_power(f, 6), coulomb_quartic(f)};
}

/// a^2 int |grad f|^2 + b^2 int f^6 - a b int (1/(2|x|) - 1/R) f^4 on D_R,
/// R being the radius of f's grid.
inline double uncertainty_gap(const RadialFunction& f, double a, double b) {
  return uncertainty_terms(f).gap(a, b);
}

/// Lower bound for min over b/a of gap(a, b) / (a b):
/// 2 sqrt(P) (sqrt(S) - sqrt(Q)), P = int |grad f|^2, S = int f^6,
/// Q = int (1 - |x|/R)^2 f^6. Attained when f is an extremal of the lemma
/// for u = 1/r - 1/R.
inline double uncertainty_floor(const RadialFunction& f) {
  const auto u = RadialWeight::coulomb(f.grid);
  const double P = radial_dirichlet(f);
  return 2.0 * std::sqrt(P) * (std::sqrt(radial_power(f, 6)) - std::sqrt(lemma_weighted_sextic(f, u)));
}

struct EqualityFamilyParams {
  double lambda = 1.0;
  double C = 1.0;
};

/// f^2 = 1 / (lambda int_0^r s u(s) ds + C), the extremals of the lemma.
inline RadialFunction equality_family(const EqualityFamilyParams& params, const RadialWeight& u) {
  RadialFunction f{u.grid, std::vector<double>(u.grid->size())};
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    const double d = params.lambda * u.moment[k] + params.C;
    if (!(d > 0.0)) throw std::domain_error("equality_family: lambda * moment + C must stay positive");
    f.values[k] = 1.0 / std::sqrt(d);
  }
  return f;
}

}  // namespace c2d
