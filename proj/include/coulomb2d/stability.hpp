#pragma once

// Constants and inequalities of the molecular stability estimate: the root
// sigma of sigma^2 / sqrt(1 - sigma) = (32 (5 pi - 1) / 27) a / b^3, the
// critical charge z_c, the bracket M(z), h(p), and the functional xi with
// its xi_1 / xi_2 split.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "coulomb2d/coulomb.hpp"
#include "coulomb2d/field2d.hpp"
#include "coulomb2d/geometry.hpp"
#include "coulomb2d/numerics.hpp"

namespace c2d {

/// beta = (4/3)^{3/2} sqrt(5 pi - 1)
inline double beta_constant() { return std::pow(4.0 / 3.0, 1.5) * std::sqrt(5.0 * pi - 1.0); }

/// C_LSY = 192 sqrt(2 pi)
inline double lsy_constant() { return 192.0 * std::sqrt(2.0 * pi); }

/// Right-hand side of the sigma equation, (32 (5 pi - 1) / 27) a / b^3.
inline double sigma_equation_rhs(double a, double b) {
  return 32.0 * (5.0 * pi - 1.0) / 27.0 * a / (b * b * b);
}

/// sigma in (0, 1) together with 1 - sigma, which is kept separately because
/// it underflows relative precision when sigma -> 1.
struct SigmaRoot {
  double sigma = 0.0;
  double complement = 1.0;  ///< 1 - sigma

  /// |sigma^2 / sqrt(1 - sigma) - rhs| / rhs
  double relative_residual(double rhs) const {
    return std::abs(sigma * sigma / std::sqrt(complement) - rhs) / rhs;
  }
};

/// Unique root of sigma^2 / sqrt(1 - sigma) = rhs on (0, 1). The left side
/// is strictly increasing, so bisection always converges; below sigma = 1/2
/// it bisects on sigma, above on t = 1 - sigma.
inline SigmaRoot sigma_root_for_rhs(double rhs) {
  if (!(rhs > 0.0) || !std::isfinite(rhs)) throw std::invalid_argument("sigma_root: rhs must be positive and finite");
  const double at_half = 0.25 / std::sqrt(0.5);
  if (rhs <= at_half) {
    // g(sigma) = sigma^2 - rhs sqrt(1 - sigma), increasing
    const double s = bisect([rhs](double x) { return x * x - rhs * std::sqrt(1.0 - x); }, 0.0, 0.5);
    return {s, 1.0 - s};
  }
  // k(t) = (1 - t)^2 - rhs sqrt(t), decreasing in t
  const double t = bisect([rhs](double x) { return (1.0 - x) * (1.0 - x) - rhs * std::sqrt(x); }, 0.0, 0.5);
  return {1.0 - t, t};
}

inline SigmaRoot sigma_root(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("sigma_root: a and b must be positive");
  return sigma_root_for_rhs(sigma_equation_rhs(a, b));
}

/// z_c(a, b) = (a b / 2) sqrt(1 - sigma)
inline double critical_charge(double a, double b) {
  return 0.5 * a * b * std::sqrt(sigma_root(a, b).complement);
}

/// h(p) = p / (1 - p^2 + p^2 sigma)^2
inline double h_of_p(double p, double sigma) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("h_of_p: p must lie in [0, 1]");
  if (!(sigma > 0.0 && sigma < 1.0)) throw std::invalid_argument("h_of_p: sigma must lie in (0, 1)");
  const double d = 1.0 - p * p + p * p * sigma;
  return p / (d * d);
}

struct StabilityParams {
  double a = 0.0;
  double b = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double z = 0.0;
  SigmaRoot root;
  double z_c = 0.0;
  double p = 0.0;
  double epsilon = 0.0;  ///< (1 - sigma) / sigma

  double sigma() const { return root.sigma; }

  /// The split used for the theorem: z = p z_c, b2 = p b sqrt(1 - sigma),
  /// b1^2 = b^2 (1 - p^2 + p^2 sigma). Then z = a b2 / 2 exactly.
  static StabilityParams theorem_split(double a, double b, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("theorem_split: p must lie in [0, 1]");
    StabilityParams s;
    s.a = a;
    s.b = b;
    s.root = sigma_root(a, b);
    s.z_c = 0.5 * a * b * std::sqrt(s.root.complement);
    s.p = p;
    s.z = p * s.z_c;
    s.b2 = p * b * std::sqrt(s.root.complement);
    s.b1 = b * std::sqrt(1.0 - p * p * s.root.complement);
    s.epsilon = s.root.complement / s.root.sigma;
    return s;
  }

  /// Free split for probing the lemma directly: any b2 in [0, b].
  static StabilityParams free_split(double a, double b, double b2, double z) {
    if (!(b2 >= 0.0 && b2 <= b)) throw std::invalid_argument("free_split: need 0 <= b2 <= b");
    StabilityParams s;
    s.a = a;
    s.b = b;
    s.root = sigma_root(a, b);
    s.z_c = 0.5 * a * b * std::sqrt(s.root.complement);
    s.b2 = b2;
    s.b1 = std::sqrt((b - b2) * (b + b2));
    s.z = z;
    s.p = s.z_c > 0.0 ? z / s.z_c : 0.0;
    s.epsilon = s.root.complement / s.root.sigma;
    return s;
  }
};

/// z^2/8 - (4 / 27 b1^4)(2 z^3 (pi - 1) + pi a^3 b2^3), valid for z <= a b2 / 2.
inline double bracket_M(double z, double a, double b1, double b2) {
  if (z > 0.5 * a * b2 * (1.0 + 1e-12))
    throw std::domain_error("bracket_M: requires z <= a b2 / 2");
  if (!(b1 > 0.0)) throw std::invalid_argument("bracket_M: b1 must be positive");
  const double b1_4 = b1 * b1 * b1 * b1;
  return z * z / 8.0 - 4.0 / (27.0 * b1_4) * (2.0 * z * z * z * (pi - 1.0) + pi * a * a * a * b2 * b2 * b2);
}

inline double bracket_M(const StabilityParams& s) { return bracket_M(s.z, s.a, s.b1, s.b2); }

/// Closed form of M under the theorem split:
/// (p^2/32) a^2 b^2 (1 - sigma) [1 - (32 a / 27 b^3) h(p) sqrt(1 - sigma) (5 pi - 1)].
inline double bracket_M_closed_form(const StabilityParams& s) {
  const double t = s.root.complement;
  const double inner = 1.0 - 32.0 * s.a / (27.0 * s.b * s.b * s.b) * h_of_p(s.p, s.root.sigma) * std::sqrt(t) *
                                 (5.0 * pi - 1.0);
  return s.p * s.p / 32.0 * s.a * s.a * s.b * s.b * t * inner;
}

/// Magnitude of the two competing pieces of M; rounding of M is relative to this.
inline double bracket_M_scale(const StabilityParams& s) {
  return s.z * s.z / 8.0 + 4.0 / (27.0 * std::pow(s.b1, 4)) *
                               (2.0 * std::pow(s.z, 3) * (pi - 1.0) + pi * std::pow(s.a * s.b2, 3));
}

/// Parameters of the final bound for a given epsilon:
/// b^2 = (1 + eps) beta, a^2 = 4 / (beta eps); sigma solves the same equation.
struct BoundParams {
  double epsilon = 0.0;
  double a = 0.0;
  double b = 0.0;
  SigmaRoot root;

  /// a b sqrt(1 - sigma); the stability constraint asks for >= 2.
  double constraint_value() const { return a * b * std::sqrt(root.complement); }

  static BoundParams from_epsilon(double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("BoundParams: epsilon must be positive");
    BoundParams p;
    p.epsilon = epsilon;
    const double beta = beta_constant();
    p.b = std::sqrt((1.0 + epsilon) * beta);
    p.a = std::sqrt(4.0 / (beta * epsilon));
    p.root = sigma_root(p.a, p.b);
    return p;
  }
};

struct XiTerms {
  double gradient = 0.0;    ///< a^2 G(rho)
  double power = 0.0;       ///< b^2 L(rho)
  double attraction = 0.0;  ///< int V rho
  double direct = 0.0;      ///< D(rho, rho)
  double repulsion = 0.0;   ///< U

  double total() const { return gradient + power - attraction + direct + repulsion; }
  double scale() const { return gradient + power + attraction + direct + repulsion; }
};

/// xi(rho) = a^2 G + b^2 L - int V rho + D + U. The attraction uses the
/// truncated-kernel potential at the nuclei; D is the reference sum for
/// n <= 128 and spectral above.
inline XiTerms xi_terms(const DensityField& rho, const NucleiConfig& nuclei, double a, double b) {
  nuclei.validate();
  XiTerms t;
  t.gradient = a * a * weizsacker_integral(rho);
  t.power = b * b * lp32_integral(rho);
  t.attraction = external_energy_spectral(rho, nuclei);
  t.direct = direct_energy(rho);
  t.repulsion = nuclear_repulsion(nuclei);
  return t;
}

inline double xi_energy(const DensityField& rho, const NucleiConfig& nuclei, double a, double b) {
  return xi_terms(rho, nuclei, a, b).total();
}

/// xi_1(rho) = b1^2 L(rho) - int (W - Phi) rho
inline double xi1_functional(const DensityField& rho, const VoronoiData& v, double a, double b1, double b2) {
  v.require_finite();
  const GridSpec& g = rho.grid();
  const double h = g.spacing();
  std::vector<double> t(rho.values().size());
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const double r = rho.at(i, j);
      t[static_cast<std::size_t>(i) * g.n + j] =
          b1 * b1 * r * std::sqrt(r) - w_minus_phi(g.cell_center(i, j), v, a, b2) * r;
    }
  return pairwise_sum(t) * h * h;
}

/// xi_2(rho) = D(rho, rho) - int Phi rho + U
inline double xi2_functional(const DensityField& rho, const VoronoiData& v) {
  const auto terms = lieb_yau_terms(rho, v);
  return terms.lhs();
}

/// Cell samples without the empty-ring requirement of DensityField.
struct CellSamples {
  GridSpec grid;
  std::vector<double> values;

  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.n + j]; }
};

/// Pointwise minimizer of xi_1: 4 (W - Phi)_+^2 / (9 b1^4), sampled per cell.
/// It decays only like 1/r^2, hence CellSamples rather than DensityField.
inline CellSamples xi1_minimizer(const VoronoiData& v, double a, double b1, double b2, const GridSpec& grid) {
  v.require_finite();
  grid.validate();
  std::vector<double> out(static_cast<std::size_t>(grid.n) * grid.n);
  const double b1_4 = b1 * b1 * b1 * b1;
  for (int i = 0; i < grid.n; ++i)
    for (int j = 0; j < grid.n; ++j) {
      const double w = std::max(0.0, w_minus_phi(grid.cell_center(i, j), v, a, b2));
      out[static_cast<std::size_t>(i) * grid.n + j] = 4.0 * w * w / (9.0 * b1_4);
    }
  return {grid, std::move(out)};
}

inline double xi1_functional(const CellSamples& samples, const VoronoiData& v, double a, double b1, double b2) {
  v.require_finite();
  const GridSpec& grid = samples.grid;
  const auto& values = samples.values;
  const double h = grid.spacing();
  std::vector<double> t(values.size());
  for (int i = 0; i < grid.n; ++i)
    for (int j = 0; j < grid.n; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * grid.n + j;
      const double r = values[k];
      t[k] = b1 * b1 * r * std::sqrt(r) - w_minus_phi(grid.cell_center(i, j), v, a, b2) * r;
    }
  return pairwise_sum(t) * h * h;
}

/// Lower bound of xi_1 from the minimizer: -(4 / 27 b1^4) int (W - Phi)_+^3.
inline double xi1_lower_bound(const VoronoiData& v, double a, double b1, double b2, const GridSpec& grid) {
  const double h = grid.spacing();
  std::vector<double> t(static_cast<std::size_t>(grid.n) * grid.n);
  for (int i = 0; i < grid.n; ++i)
    for (int j = 0; j < grid.n; ++j) {
      const double w = std::max(0.0, w_minus_phi(grid.cell_center(i, j), v, a, b2));
      t[static_cast<std::size_t>(i) * grid.n + j] = w * w * w;
    }
  return -4.0 / (27.0 * std::pow(b1, 4)) * pairwise_sum(t) * h * h;
}

}  // namespace c2d
