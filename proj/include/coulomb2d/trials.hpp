#pragma once

// Seeded random configurations for the property suites: nuclei, Gaussian
// mixtures around them, and radial profiles.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "coulomb2d/coulomb.hpp"
#include "coulomb2d/field2d.hpp"
#include "coulomb2d/numerics.hpp"
#include "coulomb2d/radial.hpp"

namespace c2d {

/// K nuclei uniform in [-box, box]^2 with pairwise separation >= min_sep.
inline NucleiConfig random_nuclei(TrialRng& rng, int K, double box, double min_sep, double z) {
  NucleiConfig out{{}, z};
  while (static_cast<int>(out.positions.size()) < K) {
    const Point p{rng.uniform(-box, box), rng.uniform(-box, box)};
    bool ok = true;
    for (const auto& q : out.positions) ok = ok && distance(p, q) >= min_sep;
    if (ok) out.positions.push_back(p);
  }
  return out;
}

/// 1 to 3 Gaussians, each near a randomly chosen anchor, decay in [0.5, 2],
/// mass log-uniform in [0.2, 3].
inline std::vector<GaussianSpec> random_mixture(TrialRng& rng, const std::vector<Point>& anchors) {
  std::vector<GaussianSpec> out;
  const int m = rng.integer(1, 3);
  for (int k = 0; k < m; ++k) {
    const Point anchor = anchors[static_cast<std::size_t>(rng.integer(0, static_cast<int>(anchors.size()) - 1))];
    const Point c = anchor + Point{rng.uniform(-0.75, 0.75), rng.uniform(-0.75, 0.75)};
    out.push_back(GaussianSpec::normalized(rng.log_uniform(0.2, 3.0), rng.uniform(0.5, 2.0), c));
  }
  return out;
}

/// Square grid centered at the origin that holds every nucleus and leaves
/// sqrt(32 / A) of room around each Gaussian, so the boundary ring is empty.
inline GridSpec enclosing_grid(int n, const std::vector<GaussianSpec>& density, const NucleiConfig& nuclei) {
  double half = 0.0;
  for (const auto& g : density)
    half = std::max(half, std::max(std::abs(g.center.x), std::abs(g.center.y)) + std::sqrt(32.0 / g.A));
  for (const auto& p : nuclei.positions) half = std::max(half, std::max(std::abs(p.x), std::abs(p.y)) + 1.0);
  return {n, 2.0 * half, {}};
}

struct MoleculeTrial {
  NucleiConfig nuclei;
  std::vector<GaussianSpec> density;
  GridSpec grid;
  double a = 1.0;
  double b = 1.0;

  DensityField field() const { return mixture_density(density, grid); }
};

/// K in [k_min, k_max] nuclei of charge z in [-3, 3]^2 (separation >= 0.6),
/// a and b log-uniform in [0.5, 2], and a mixture density around the nuclei.
inline MoleculeTrial random_molecule(TrialRng& rng, int n, int k_min, int k_max, double z) {
  MoleculeTrial t;
  t.a = rng.log_uniform(0.5, 2.0);
  t.b = rng.log_uniform(0.5, 2.0);
  t.nuclei = random_nuclei(rng, rng.integer(k_min, k_max), 3.0, 0.6, z);
  t.density = random_mixture(rng, t.nuclei.positions);
  t.grid = enclosing_grid(n, t.density, t.nuclei);
  return t;
}

/// Smooth radial profile sum_k c_k exp(-alpha_k r^2) with 1 to 3 terms,
/// c_k in [0.1, 2] and alpha_k R^2 log-uniform in [0.1, 10].
inline std::function<double(double)> random_radial_profile(TrialRng& rng, double R) {
  const int m = rng.integer(1, 3);
  std::vector<double> c, alpha;
  for (int k = 0; k < m; ++k) {
    c.push_back(rng.uniform(0.1, 2.0));
    alpha.push_back(rng.log_uniform(0.1, 10.0) / (R * R));
  }
  return [c, alpha](double r) {
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * std::exp(-alpha[k] * r * r);
    return s;
  };
}

/// Smooth weight with u(R) = 0: u = (1 - r/R)(1 + kappa r^2/R^2) / R.
inline std::function<double(double)> random_smooth_weight(TrialRng& rng, double R) {
  const double kappa = rng.uniform(0.0, 3.0);
  return [R, kappa](double r) { return (1.0 - r / R) * (1.0 + kappa * r * r / (R * R)) / R; };
}

}  // namespace c2d
