#pragma once

// Densities sampled on a uniform, cell-centered square grid and the local
// functionals evaluated on them.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coulomb2d/numerics.hpp"

namespace c2d {

/// Square grid of n x n cells of side extent/n, centered at `origin`.
struct GridSpec {
  int n = 64;
  double extent = 10.0;
  Point origin{};

  double spacing() const { return extent / n; }
  double lower_x() const { return origin.x - 0.5 * extent; }
  double lower_y() const { return origin.y - 0.5 * extent; }

  Point cell_center(int i, int j) const {
    const double h = spacing();
    return {lower_x() + (i + 0.5) * h, lower_y() + (j + 0.5) * h};
  }

  bool contains(Point p) const {
    return p.x >= lower_x() && p.x <= lower_x() + extent && p.y >= lower_y() &&
           p.y <= lower_y() + extent;
  }

  /// Index of the cell holding `p` (points on the outer edge belong to the
  /// last cell); empty if `p` is outside the domain.
  std::optional<std::pair<int, int>> cell_of(Point p) const {
    if (!contains(p)) return std::nullopt;
    const double h = spacing();
    const int i = std::clamp(static_cast<int>(std::floor((p.x - lower_x()) / h)), 0, n - 1);
    const int j = std::clamp(static_cast<int>(std::floor((p.y - lower_y()) / h)), 0, n - 1);
    return std::pair{i, j};
  }

  void validate() const {
    if (n < 8) throw std::invalid_argument("GridSpec: n must be at least 8, got " + std::to_string(n));
    if (!(extent > 0.0) || !std::isfinite(extent))
      throw std::invalid_argument("GridSpec: extent must be positive and finite");
    if (!std::isfinite(origin.x) || !std::isfinite(origin.y))
      throw std::invalid_argument("GridSpec: origin must be finite");
  }
};

/// Nonnegative density on a GridSpec. Immutable once built; the outermost
/// ring of cells must be numerically empty (<= 1e-12 of the peak).
class DensityField {
 public:
  static constexpr double ring_tolerance = 1e-12;

  DensityField(GridSpec grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {
    grid_.validate();
    const std::size_t expected = static_cast<std::size_t>(grid_.n) * grid_.n;
    if (values_.size() != expected)
      throw std::invalid_argument("DensityField: expected " + std::to_string(expected) +
                                  " values, got " + std::to_string(values_.size()));
    for (double v : values_) {
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("DensityField: values must be finite and nonnegative");
      max_ = std::max(max_, v);
    }
    const int n = grid_.n;
    double ring = 0.0;
    for (int k = 0; k < n; ++k) {
      ring = std::max({ring, at(0, k), at(n - 1, k), at(k, 0), at(k, n - 1)});
    }
    if (ring > ring_tolerance * max_)
      throw std::invalid_argument("DensityField: boundary ring value " + std::to_string(ring) +
                                  " exceeds 1e-12 of the peak; enlarge the extent");
  }

  static DensityField zeros(const GridSpec& grid) {
    return DensityField(grid, std::vector<double>(static_cast<std::size_t>(grid.n) * grid.n, 0.0));
  }

  const GridSpec& grid() const { return grid_; }
  int n() const { return grid_.n; }
  double spacing() const { return grid_.spacing(); }
  double max_value() const { return max_; }
  std::span<const double> values() const { return values_; }
  double at(int i, int j) const { return values_[static_cast<std::size_t>(i) * grid_.n + j]; }

  /// Same grid, every value multiplied by `factor` >= 0.
  DensityField scaled(double factor) const {
    if (!(factor >= 0.0)) throw std::invalid_argument("DensityField::scaled: factor must be >= 0");
    std::vector<double> v(values_);
    for (double& x : v) x *= factor;
    return DensityField(grid_, std::move(v));
  }

  /// Same values on a grid whose origin is shifted by `offset`.
  DensityField translated(Point offset) const {
    GridSpec g = grid_;
    g.origin = g.origin + offset;
    return DensityField(g, values_);
  }

  friend DensityField operator+(const DensityField& a, const DensityField& b) {
    if (a.grid_.n != b.grid_.n || a.grid_.extent != b.grid_.extent ||
        a.grid_.origin.x != b.grid_.origin.x || a.grid_.origin.y != b.grid_.origin.y)
      throw std::invalid_argument("DensityField: cannot add fields on different grids");
    std::vector<double> v(a.values_);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += b.values_[k];
    return DensityField(a.grid_, std::move(v));
  }

 private:
  GridSpec grid_;
  std::vector<double> values_;
  double max_ = 0.0;
};

/// rho(x) = C exp(-A |x - center|^2)
struct GaussianSpec {
  double C = 1.0;
  double A = 1.0;
  Point center{};

  void validate() const {
    if (!(C > 0.0) || !(A > 0.0)) throw std::invalid_argument("GaussianSpec: C and A must be positive");
  }
  double operator()(Point x) const {
    const double dx = x.x - center.x;
    const double dy = x.y - center.y;
    return C * std::exp(-A * (dx * dx + dy * dy));
  }
  double mass() const { return C * pi / A; }

  /// Gaussian of total charge `mass` and decay A.
  static GaussianSpec normalized(double mass, double A, Point center = {}) {
    return {mass * A / pi, A, center};
  }
};

namespace detail {

template <class F>
double grid_sum(const DensityField& rho, F&& per_value) {
  std::vector<double> t(rho.values().size());
  const auto v = rho.values();
  for (std::size_t k = 0; k < v.size(); ++k) t[k] = per_value(v[k]);
  return pairwise_sum(t);
}

}  // namespace detail

/// Midpoint rule: sum of values times h^2.
inline double integrate(const DensityField& rho) {
  const double h = rho.spacing();
  return detail::grid_sum(rho, [](double v) { return v; }) * h * h;
}

/// L(rho) = int rho^{3/2}
inline double lp32_integral(const DensityField& rho) {
  const double h = rho.spacing();
  return detail::grid_sum(rho, [](double v) { return v * std::sqrt(v); }) * h * h;
}

/// G(rho) = int |grad rho^{1/4}|^2. Central differences on q = rho^{1/4};
/// next to a zero cell (or the zero-padded grid edge) the stencil falls back
/// to the one-sided difference towards the support.
inline double weizsacker_integral(const DensityField& rho) {
  const int n = rho.n();
  const double h = rho.spacing();
  std::vector<double> q(rho.values().size());
  for (std::size_t k = 0; k < q.size(); ++k) q[k] = std::sqrt(std::sqrt(rho.values()[k]));
  auto Q = [&](int i, int j) -> double {
    if (i < 0 || j < 0 || i >= n || j >= n) return 0.0;
    return q[static_cast<std::size_t>(i) * n + j];
  };
  auto derivative = [&](double here, double prev, double next) {
    if (here <= 0.0) return 0.0;
    const bool has_prev = prev > 0.0;
    const bool has_next = next > 0.0;
    if (has_prev && has_next) return (next - prev) / (2.0 * h);
    if (has_next) return (next - here) / h;
    if (has_prev) return (here - prev) / h;
    return 0.0;
  };
  std::vector<double> t(q.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double c = Q(i, j);
      const double gx = derivative(c, Q(i - 1, j), Q(i + 1, j));
      const double gy = derivative(c, Q(i, j - 1), Q(i, j + 1));
      t[static_cast<std::size_t>(i) * n + j] = gx * gx + gy * gy;
    }
  }
  return pairwise_sum(t) * h * h;
}

inline DensityField gaussian_density(const GaussianSpec& spec, const GridSpec& grid) {
  spec.validate();
  grid.validate();
  std::vector<double> v(static_cast<std::size_t>(grid.n) * grid.n);
  for (int i = 0; i < grid.n; ++i)
    for (int j = 0; j < grid.n; ++j) v[static_cast<std::size_t>(i) * grid.n + j] = spec(grid.cell_center(i, j));
  return DensityField(grid, std::move(v));
}

inline DensityField mixture_density(std::span<const GaussianSpec> components, const GridSpec& grid) {
  grid.validate();
  std::vector<double> v(static_cast<std::size_t>(grid.n) * grid.n, 0.0);
  for (const auto& c : components) {
    c.validate();
    for (int i = 0; i < grid.n; ++i)
      for (int j = 0; j < grid.n; ++j) v[static_cast<std::size_t>(i) * grid.n + j] += c(grid.cell_center(i, j));
  }
  return DensityField(grid, std::move(v));
}

/// Number of rows and columns holding values above the ring tolerance.
inline std::pair<int, int> support_span(const DensityField& rho) {
  const int n = rho.n();
  const double thr = DensityField::ring_tolerance * rho.max_value();
  int rows = 0, cols = 0;
  for (int i = 0; i < n; ++i) {
    bool any = false;
    for (int j = 0; j < n && !any; ++j) any = rho.at(i, j) > thr;
    rows += any;
  }
  for (int j = 0; j < n; ++j) {
    bool any = false;
    for (int i = 0; i < n && !any; ++i) any = rho.at(i, j) > thr;
    cols += any;
  }
  return {rows, cols};
}

/// Bilinear interpolation of the cell-centered samples, with the field taken
/// as zero beyond the grid.
inline double sample_bilinear(const DensityField& rho, Point p) {
  const GridSpec& g = rho.grid();
  const double h = g.spacing();
  const double fx = (p.x - g.lower_x()) / h - 0.5;
  const double fy = (p.y - g.lower_y()) / h - 0.5;
  const int i0 = static_cast<int>(std::floor(fx));
  const int j0 = static_cast<int>(std::floor(fy));
  const double tx = fx - i0;
  const double ty = fy - j0;
  auto val = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= g.n || j >= g.n) return 0.0;
    return rho.at(i, j);
  };
  return (1 - tx) * (1 - ty) * val(i0, j0) + tx * (1 - ty) * val(i0 + 1, j0) +
         (1 - tx) * ty * val(i0, j0 + 1) + tx * ty * val(i0 + 1, j0 + 1);
}

/// rho_alpha(x) = alpha^2 rho(alpha x), resampled onto `target`.
inline DensityField dilate(const DensityField& rho, double alpha, const GridSpec& target) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("dilate: alpha must be positive");
  target.validate();
  std::vector<double> v(static_cast<std::size_t>(target.n) * target.n);
  for (int i = 0; i < target.n; ++i)
    for (int j = 0; j < target.n; ++j)
      v[static_cast<std::size_t>(i) * target.n + j] =
          alpha * alpha * sample_bilinear(rho, alpha * target.cell_center(i, j));
  DensityField out(target, std::move(v));
  if (rho.max_value() > 0.0) {
    const auto [rows, cols] = support_span(out);
    if (rows < 8 || cols < 8)
      throw std::domain_error("dilate: dilated support spans fewer than 8 cells");
  }
  return out;
}

/// Dilation onto the grid with extent/alpha and origin/alpha. Cell centers
/// map onto the original centers, so the resampling is exact.
inline DensityField dilate(const DensityField& rho, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("dilate: alpha must be positive");
  GridSpec g = rho.grid();
  g.extent /= alpha;
  g.origin = (1.0 / alpha) * g.origin;
  return dilate(rho, alpha, g);
}

}  // namespace c2d
