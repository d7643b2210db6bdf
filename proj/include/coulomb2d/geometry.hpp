#pragma once

// Voronoi (nearest-nucleus) cells, the half-distances D_j, the piecewise
// potentials Phi and W, the half-plane tail integral and the electrostatic
// gap D - int Phi rho + U - (z^2/8) sum 1/D_j.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "coulomb2d/coulomb.hpp"
#include "coulomb2d/field2d.hpp"
#include "coulomb2d/numerics.hpp"

namespace c2d {

/// Index of the nearest nucleus; ties go to the lowest index.
inline std::size_t nearest_nucleus(Point x, const NucleiConfig& nuclei) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < nuclei.size(); ++k) {
    const double d = distance(x, nuclei.positions[k]);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

struct VoronoiData {
  /// D_j for a lone nucleus (no cell boundary).
  static constexpr double unbounded = std::numeric_limits<double>::infinity();

  NucleiConfig nuclei;
  GridSpec grid;
  std::vector<double> half_distance;  ///< D_j = (1/2) min_{k != j} |R_k - R_j|
  std::vector<int> owner;             ///< nearest nucleus per grid cell, row-major

  int owner_at(int i, int j) const { return owner[static_cast<std::size_t>(i) * grid.n + j]; }

  void require_finite() const {
    if (nuclei.size() < 2)
      throw std::domain_error("operation needs at least two nuclei (D_j is unbounded for K = 1)");
  }
};

inline VoronoiData build_voronoi(const NucleiConfig& nuclei, const GridSpec& grid) {
  nuclei.validate();
  grid.validate();
  VoronoiData v{nuclei, grid, std::vector<double>(nuclei.size(), VoronoiData::unbounded), {}};
  for (std::size_t j = 0; j < nuclei.size(); ++j)
    for (std::size_t k = 0; k < nuclei.size(); ++k)
      if (k != j)
        v.half_distance[j] = std::min(v.half_distance[j], 0.5 * distance(nuclei.positions[j], nuclei.positions[k]));
  v.owner.resize(static_cast<std::size_t>(grid.n) * grid.n);
  for (int i = 0; i < grid.n; ++i)
    for (int j = 0; j < grid.n; ++j)
      v.owner[static_cast<std::size_t>(i) * grid.n + j] =
          static_cast<int>(nearest_nucleus(grid.cell_center(i, j), nuclei));
  return v;
}

namespace detail {

inline double phi_with_owner(Point x, const NucleiConfig& nuclei, std::size_t owner) {
  double s = 0.0;
  for (std::size_t i = 0; i < nuclei.size(); ++i) {
    if (i == owner) continue;
    const double d = distance(x, nuclei.positions[i]);
    if (d == 0.0) throw std::domain_error("Phi evaluated on a nucleus of another cell");
    s += nuclei.z / d;
  }
  return s;
}

inline double w_with_owner(Point x, const VoronoiData& v, std::size_t owner, double a, double b2) {
  const double phi = phi_with_owner(x, v.nuclei, owner);
  const double d = distance(x, v.nuclei.positions[owner]);
  const double Dj = v.half_distance[owner];
  if (d < Dj) return phi + a * b2 / Dj;
  return phi + v.nuclei.z / d;
}

}  // namespace detail

/// Phi(x): potential of every nucleus except the one owning x's cell.
inline double phi_potential(Point x, const VoronoiData& v) {
  return detail::phi_with_owner(x, v.nuclei, nearest_nucleus(x, v.nuclei));
}

/// W(x) = Phi + a b2 / D_j inside the disk B_j (|x - R_j| < D_j strictly),
/// W = V on the rest of the cell.
inline double w_potential(Point x, const VoronoiData& v, double a, double b2) {
  v.require_finite();
  return detail::w_with_owner(x, v, nearest_nucleus(x, v.nuclei), a, b2);
}

/// (W - Phi)(x); nonnegative for a, b2, z >= 0.
inline double w_minus_phi(Point x, const VoronoiData& v, double a, double b2) {
  v.require_finite();
  const std::size_t j = nearest_nucleus(x, v.nuclei);
  const double d = distance(x, v.nuclei.positions[j]);
  const double Dj = v.half_distance[j];
  return d < Dj ? a * b2 / Dj : v.nuclei.z / d;
}

/// int over H \ D_L(x0) of |x - x0|^{-3}, H a half plane at distance L from x0.
inline double halfplane_tail_integral(double L) {
  if (!(L > 0.0)) throw std::invalid_argument("halfplane_tail_integral: L must be positive");
  return 2.0 * (pi - 1.0) / L;
}

struct HalfplaneCheck {
  double L = 0.0;
  double analytic = 0.0;
  double numeric = 0.0;
  double relative_gap = 0.0;
};

/// Polar quadrature around x0 with the boundary parallel to the x axis:
/// directions towards the boundary end at L / cos(phi), the others run to
/// infinity; each regime is doubled by symmetry.
inline HalfplaneCheck verify_halfplane_tail(double L) {
  const double analytic = halfplane_tail_integral(L);
  auto inverse_square = [](double r) { return 1.0 / (r * r); };
  const double towards = integrate_adaptive(
      [&](double phi) { return integrate_adaptive(inverse_square, L, L / std::cos(phi)); }, -pi / 2, 0.0);
  const double away = integrate_adaptive(
      [&](double) { return integrate_adaptive(inverse_square, L, std::numeric_limits<double>::infinity()); }, 0.0,
      pi / 2);
  const double numeric = 2.0 * towards + 2.0 * away;
  return {L, analytic, numeric, std::abs(numeric - analytic) / analytic};
}

struct LiebYauTerms {
  double direct = 0.0;     ///< D(rho, rho)
  double phi_rho = 0.0;    ///< int Phi rho
  double repulsion = 0.0;  ///< U
  double bound = 0.0;      ///< (z^2 / 8) sum_j 1/D_j

  double lhs() const { return direct - phi_rho + repulsion; }
  double gap() const { return lhs() - bound; }
  double scale() const { return std::abs(lhs()) + bound; }
};

/// int Phi rho with the cell owners of `v` (which must share rho's grid).
/// Midpoint rule, except that cells near a foreign nucleus use that
/// nucleus' exact cell average.
inline double phi_integral(const DensityField& rho, const VoronoiData& v) {
  const GridSpec& g = rho.grid();
  if (g.n != v.grid.n || g.extent != v.grid.extent || g.origin.x != v.grid.origin.x || g.origin.y != v.grid.origin.y)
    throw std::invalid_argument("phi_integral: Voronoi data built on a different grid");
  const double h = g.spacing();
  const auto& nuclei = v.nuclei;
  std::vector<std::pair<int, int>> home(nuclei.size(), {-1, -1});
  for (std::size_t k = 0; k < nuclei.size(); ++k)
    if (auto c = g.cell_of(nuclei.positions[k])) home[k] = *c;
  std::vector<double> t(rho.values().size(), 0.0);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const double r = rho.at(i, j);
      if (r == 0.0) continue;
      const Point x = g.cell_center(i, j);
      const auto owner = static_cast<std::size_t>(v.owner_at(i, j));
      double phi = 0.0;
      for (std::size_t k = 0; k < nuclei.size(); ++k) {
        if (k == owner) continue;
        if (home[k].first >= 0 && near_cell(home[k], i, j))
          phi += cell_inverse_distance_integral(g, i, j, nuclei.positions[k]) / (h * h);
        else
          phi += 1.0 / distance(x, nuclei.positions[k]);
      }
      t[static_cast<std::size_t>(i) * g.n + j] = r * nuclei.z * phi;
    }
  return pairwise_sum(t) * h * h;
}

inline LiebYauTerms lieb_yau_terms(const DensityField& rho, const VoronoiData& v) {
  v.require_finite();
  LiebYauTerms terms;
  terms.direct = direct_energy(rho);
  terms.phi_rho = phi_integral(rho, v);
  terms.repulsion = nuclear_repulsion(v.nuclei);
  std::vector<double> inv;
  for (double d : v.half_distance) inv.push_back(1.0 / d);
  terms.bound = v.nuclei.z * v.nuclei.z / 8.0 * pairwise_sum(inv);
  return terms;
}

inline double lieb_yau_gap(const DensityField& rho, const VoronoiData& v) { return lieb_yau_terms(rho, v).gap(); }

}  // namespace c2d
