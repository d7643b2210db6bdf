#pragma once

// Coulomb pieces with the 3D kernel 1/|x - y| restricted to the plane:
// direct term D(rho, rho), nuclear attraction int V rho, nuclear repulsion U.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <fftw3.h>

#include "coulomb2d/field2d.hpp"
#include "coulomb2d/numerics.hpp"

namespace c2d {

/// K point charges of a common charge z.
struct NucleiConfig {
  std::vector<Point> positions;
  double z = 1.0;

  std::size_t size() const { return positions.size(); }

  void validate() const {
    if (positions.empty()) throw std::invalid_argument("NucleiConfig: need at least one nucleus");
    if (!(z >= 0.0) || !std::isfinite(z)) throw std::invalid_argument("NucleiConfig: z must be >= 0");
    for (std::size_t i = 0; i < positions.size(); ++i) {
      if (!std::isfinite(positions[i].x) || !std::isfinite(positions[i].y))
        throw std::invalid_argument("NucleiConfig: positions must be finite");
      for (std::size_t j = 0; j < i; ++j)
        if (positions[i].x == positions[j].x && positions[i].y == positions[j].y)
          throw std::invalid_argument("NucleiConfig: nuclei " + std::to_string(j) + " and " +
                                      std::to_string(i) + " coincide");
    }
  }

  NucleiConfig translated(Point offset) const {
    NucleiConfig out = *this;
    for (auto& p : out.positions) p = p + offset;
    return out;
  }

  NucleiConfig scaled(double factor) const {
    NucleiConfig out = *this;
    for (auto& p : out.positions) p = factor * p;
    return out;
  }
};

/// Unit-square constants for the singular kernel. Values for a cell of
/// side h are the unit values divided by h.
struct CellConstants {
  double c_self = 0.0;  ///< mean of 1/|X - Y|, X, Y uniform on the unit square
  double c_nuc = 0.0;   ///< int over [-1/2, 1/2]^2 of 1/|x|
  double c_trap = 0.0;  ///< corrected-trapezoid weight -Z(1/2), Z the square-lattice Epstein zeta
};

inline constexpr int cell_constants_version = 1;

inline CellConstants derive_cell_constants() {
  CellConstants c;
  // Polar coordinates around the singular point; the Jacobian r cancels 1/r.
  c.c_nuc = 8.0 * integrate_adaptive(
                      [](double phi) {
                        return integrate_adaptive([](double) { return 1.0; }, 0.0, 0.5 / std::cos(phi));
                      },
                      0.0, pi / 4);
  // Difference X - Y has density (1 - |u|)(1 - |v|) on [-1, 1]^2.
  c.c_self = 8.0 * integrate_adaptive(
                       [](double phi) {
                         const double cs = std::cos(phi), sn = std::sin(phi);
                         return integrate_adaptive(
                             [cs, sn](double r) { return (1.0 - r * cs) * (1.0 - r * sn); }, 0.0,
                             1.0 / cs);
                       },
                       0.0, pi / 4);
  // Z(1/2) = -4 + 2 int_1^inf t^{-1/2} (theta(t)^2 - 1) dt, theta(t) = sum_n exp(-pi n^2 t).
  const double tail = integrate_adaptive(
      [](double t) {
        double theta = 1.0;
        for (int k = 1; k < 12; ++k) theta += 2.0 * std::exp(-pi * k * k * t);
        return (theta * theta - 1.0) / std::sqrt(t);
      },
      1.0, std::numeric_limits<double>::infinity());
  c.c_trap = 4.0 - 2.0 * tail;
  return c;
}

inline const CellConstants& cell_constants() {
  static const CellConstants cached = derive_cell_constants();
  return cached;
}

/// Which weight the reference evaluator puts on a cell's self-interaction.
enum class SelfCellRule {
  corrected_trapezoid,  ///< c_trap / h: third order for smooth fields
  uniform_cell,         ///< c_self / h: exact for piecewise-constant cells, first order overall
};

struct ReferenceOptions {
  SelfCellRule rule = SelfCellRule::corrected_trapezoid;
  int max_n = 128;
  unsigned threads = 0;  ///< 0: hardware concurrency
};

/// O(M^2) double sum. Off-diagonal pairs use the point kernel, the diagonal
/// uses the selected self-cell weight.
inline double direct_energy_reference(const DensityField& rho, const ReferenceOptions& opt = {}) {
  const int n = rho.n();
  if (n > opt.max_n)
    throw std::invalid_argument("direct_energy_reference: n = " + std::to_string(n) +
                                " exceeds the cap " + std::to_string(opt.max_n));
  const double h = rho.spacing();
  const int w = 2 * n - 1;
  std::vector<double> kernel(static_cast<std::size_t>(w) * w);
  for (int a = 0; a < w; ++a)
    for (int b = 0; b < w; ++b) kernel[static_cast<std::size_t>(a) * w + b] = 1.0 / std::hypot(a - (n - 1), b - (n - 1));
  const double self = opt.rule == SelfCellRule::corrected_trapezoid ? cell_constants().c_trap
                                                                     : cell_constants().c_self;
  kernel[static_cast<std::size_t>(n - 1) * w + (n - 1)] = self;

  const auto v = rho.values();
  std::vector<char> row_nonzero(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) row_nonzero[i] |= v[static_cast<std::size_t>(i) * n + j] != 0.0;

  // Row partials are written by index, so the final reduction does not
  // depend on how rows are distributed over threads.
  std::vector<double> row_partial(n, 0.0);
  auto work_row = [&](int ix) {
    if (!row_nonzero[ix]) return;
    std::vector<double> t(n);
    for (int iy = 0; iy < n; ++iy) {
      const double ri = v[static_cast<std::size_t>(ix) * n + iy];
      if (ri == 0.0) {
        t[iy] = 0.0;
        continue;
      }
      double u = 0.0;
      for (int jx = 0; jx < n; ++jx) {
        if (!row_nonzero[jx]) continue;
        const double* krow = &kernel[static_cast<std::size_t>(jx - ix + n - 1) * w + (n - 1 - iy)];
        const double* rrow = &v[static_cast<std::size_t>(jx) * n];
        double s = 0.0;
        for (int jy = 0; jy < n; ++jy) s += rrow[jy] * krow[jy];
        u += s;
      }
      t[iy] = ri * u;
    }
    row_partial[ix] = pairwise_sum(t);
  };
  unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, n);
  if (threads <= 1) {
    for (int ix = 0; ix < n; ++ix) work_row(ix);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (int ix = static_cast<int>(t); ix < n; ix += static_cast<int>(threads)) work_row(ix);
      });
    for (auto& th : pool) th.join();
  }
  // h^4 from the two cell areas, 1/h from the kernel.
  return 0.5 * pairwise_sum(row_partial) * h * h * h;
}

namespace detail {

/// int_0^s J0(t) dt = 2 sum_k J_{2k+1}(s); all orders from Miller's
/// backward recurrence normalized by J0 + 2 sum_k J_{2k} = 1.
inline double integral_j0(double s) {
  if (s == 0.0) return 0.0;
  if (s < 1e-4) return s - s * s * s / 12.0;
  int m = static_cast<int>(s + 12.0 * std::cbrt(s) + 40.0);
  m += m % 2;
  double next = 0.0, cur = 1e-300, norm = 0.0, odd = 0.0;
  for (int k = m; k >= 1; --k) {
    const double prev = (2.0 * k / s) * cur - next;  // J_{k-1}
    next = cur;
    cur = prev;
    const int order = k - 1;
    if (order == 0)
      norm += cur;
    else if (order % 2 == 0)
      norm += 2.0 * cur;
    else
      odd += cur;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
      odd *= 1e-250;
    }
  }
  return 2.0 * odd / norm;
}

/// Symbol of the kernel 1/|x| truncated at |x| = R, divided by 2 pi R:
/// g(s) = (1/s) int_0^s J0, s = |k| R, g(0) = 1.
inline double truncated_symbol_ratio(double s) { return s == 0.0 ? 1.0 : integral_j0(s) / s; }

/// Symbol table for a padded grid of P = 4n points, indexed by i^2 + j^2 with
/// 0 <= i, j <= P/2. With R = sqrt(2) n h, s = (pi / sqrt 2) sqrt(i^2 + j^2)
/// does not depend on h, so one table serves every grid of that size.
inline const std::vector<double>& truncated_symbol_table(int padded) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const std::vector<double>>> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(padded); it != cache.end()) return *it->second;
  const int half = padded / 2;
  const std::size_t mmax = 2 * static_cast<std::size_t>(half) * half;
  std::vector<double> table(mmax + 1, std::numeric_limits<double>::quiet_NaN());
  const double step = pi * std::sqrt(2.0) * (padded / 4) * 2.0 / padded;
  for (int i = 0; i <= half; ++i)
    for (int j = 0; j <= i; ++j) {
      const std::size_t m = static_cast<std::size_t>(i) * i + static_cast<std::size_t>(j) * j;
      if (std::isnan(table[m])) table[m] = truncated_symbol_ratio(step * std::sqrt(static_cast<double>(m)));
    }
  auto ptr = std::make_shared<const std::vector<double>>(std::move(table));
  cache.emplace(padded, ptr);
  return *ptr;
}

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

/// Fourier transform of a density zero-padded to 4n x 4n, paired with the
/// symbol of the kernel truncated at the unpadded domain diameter.
class TruncatedKernelTransform {
 public:
  static constexpr int padding = 4;

  explicit TruncatedKernelTransform(const DensityField& rho)
      : grid_(rho.grid()), padded_(padding * rho.n()), half_(padded_ / 2 + 1) {
    const int n = rho.n();
    const int P = padded_;
    const double h = grid_.spacing();
    double* in = fftw_alloc_real(static_cast<std::size_t>(P) * P);
    fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(P) * half_);
    std::fill(in, in + static_cast<std::size_t>(P) * P, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) in[static_cast<std::size_t>(i) * P + j] = rho.at(i, j);
    fftw_plan plan;
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      plan = fftw_plan_dft_r2c_2d(P, P, in, out, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    spectrum_.resize(static_cast<std::size_t>(P) * half_);
    for (std::size_t k = 0; k < spectrum_.size(); ++k) spectrum_[k] = {out[k][0] * h * h, out[k][1] * h * h};
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);

    const auto& table = detail::truncated_symbol_table(P);
    const double radius = std::sqrt(2.0) * grid_.extent;
    symbol_.resize(spectrum_.size());
    for (int i = 0; i < P; ++i) {
      const int mi = std::min(i, P - i);
      for (int j = 0; j < half_; ++j)
        symbol_[static_cast<std::size_t>(i) * half_ + j] =
            2.0 * pi * radius * table[static_cast<std::size_t>(mi) * mi + static_cast<std::size_t>(j) * j];
    }
  }

  /// D(rho, rho) = (1 / 2 Lp^2) sum_k K(k) |rho(k)|^2
  double energy() const {
    std::vector<double> t(spectrum_.size());
    for (int i = 0; i < padded_; ++i)
      for (int j = 0; j < half_; ++j) {
        const std::size_t k = static_cast<std::size_t>(i) * half_ + j;
        const double weight = (j == 0 || j == padded_ / 2) ? 1.0 : 2.0;
        t[k] = weight * symbol_[k] * std::norm(spectrum_[k]);
      }
    const double lp = padded_ * grid_.spacing();
    return 0.5 * pairwise_sum(t) / (lp * lp);
  }

  /// Potential int rho(x) / |x - y| dx at a point y of the domain.
  double potential_at(Point y) const {
    if (!grid_.contains(y)) throw std::invalid_argument("potential_at: point outside the domain");
    const double h = grid_.spacing();
    const double lp = padded_ * h;
    const Point first = grid_.cell_center(0, 0);
    const double dx = y.x - first.x;
    const double dy = y.y - first.y;
    std::vector<std::complex<double>> ex(padded_), ey(half_);
    for (int i = 0; i < padded_; ++i) {
      const int f = i <= padded_ / 2 ? i : i - padded_;
      ex[i] = std::polar(1.0, 2.0 * pi * f * dx / lp);
    }
    for (int j = 0; j < half_; ++j) ey[j] = std::polar(1.0, 2.0 * pi * j * dy / lp);
    std::vector<double> t(spectrum_.size());
    for (int i = 0; i < padded_; ++i)
      for (int j = 0; j < half_; ++j) {
        const std::size_t k = static_cast<std::size_t>(i) * half_ + j;
        const double weight = (j == 0 || j == padded_ / 2) ? 1.0 : 2.0;
        t[k] = weight * symbol_[k] * (spectrum_[k] * ex[i] * ey[j]).real();
      }
    return pairwise_sum(t) / (lp * lp);
  }

 private:
  GridSpec grid_;
  int padded_;
  int half_;
  std::vector<std::complex<double>> spectrum_;
  std::vector<double> symbol_;
};

inline double direct_energy_spectral(const DensityField& rho) {
  if (rho.max_value() == 0.0) return 0.0;
  return TruncatedKernelTransform(rho).energy();
}

/// Reference sum up to n = 128, spectral above.
inline double direct_energy(const DensityField& rho) {
  return rho.n() <= 128 ? direct_energy_reference(rho) : direct_energy_spectral(rho);
}

namespace detail {

/// int over [0, a] x [0, b] of 1/|x| for a, b >= 0.
inline double quadrant_inverse_distance(double a, double b) {
  if (a <= 0.0 || b <= 0.0) return 0.0;
  return a * std::asinh(b / a) + b * std::asinh(a / b);
}

inline double signed_quadrant(double x, double y) {
  const double s = (x < 0 ? -1.0 : 1.0) * (y < 0 ? -1.0 : 1.0);
  return s * quadrant_inverse_distance(std::abs(x), std::abs(y));
}

}  // namespace detail

/// Exact int over the cell (i, j) of 1/|x - p|; equals c_nuc * h when p is
/// the cell center.
inline double cell_inverse_distance_integral(const GridSpec& grid, int i, int j, Point p) {
  const double h = grid.spacing();
  const double x1 = grid.lower_x() + i * h - p.x, x2 = x1 + h;
  const double y1 = grid.lower_y() + j * h - p.y, y2 = y1 + h;
  using detail::signed_quadrant;
  return signed_quadrant(x2, y2) - signed_quadrant(x1, y2) - signed_quadrant(x2, y1) + signed_quadrant(x1, y1);
}

inline void require_nuclei_inside(const GridSpec& grid, const NucleiConfig& nuclei) {
  for (std::size_t k = 0; k < nuclei.size(); ++k)
    if (!grid.contains(nuclei.positions[k]))
      throw std::invalid_argument("nucleus " + std::to_string(k) + " lies outside the density domain");
}

/// Cells within this many steps of a nucleus' home cell (in both directions)
/// use the exact cell average of 1/|x - R| instead of the midpoint value.
inline constexpr int exact_cell_radius = 2;

inline bool near_cell(std::pair<int, int> home, int i, int j) {
  return std::abs(home.first - i) <= exact_cell_radius && std::abs(home.second - j) <= exact_cell_radius;
}

/// int V rho on the grid: midpoint values of V, except near a nucleus, where
/// cells take that nucleus' exact cell average.
inline double external_energy(const DensityField& rho, const NucleiConfig& nuclei) {
  nuclei.validate();
  const GridSpec& g = rho.grid();
  require_nuclei_inside(g, nuclei);
  const double h = g.spacing();
  std::vector<std::pair<int, int>> home(nuclei.size());
  for (std::size_t k = 0; k < nuclei.size(); ++k) home[k] = *g.cell_of(nuclei.positions[k]);
  std::vector<double> t(rho.values().size(), 0.0);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const double r = rho.at(i, j);
      if (r == 0.0) continue;
      const Point x = g.cell_center(i, j);
      double integral = 0.0;  // int over the cell of V, divided by z
      for (std::size_t k = 0; k < nuclei.size(); ++k) {
        if (near_cell(home[k], i, j))
          integral += cell_inverse_distance_integral(g, i, j, nuclei.positions[k]);
        else
          integral += h * h / distance(x, nuclei.positions[k]);
      }
      t[static_cast<std::size_t>(i) * g.n + j] = r * integral;
    }
  return nuclei.z * pairwise_sum(t);
}

/// int V rho = z sum_k u(R_k), u the truncated-kernel potential of rho.
inline double external_energy_spectral(const DensityField& rho, const NucleiConfig& nuclei) {
  nuclei.validate();
  require_nuclei_inside(rho.grid(), nuclei);
  if (rho.max_value() == 0.0) return 0.0;
  const TruncatedKernelTransform tr(rho);
  std::vector<double> t;
  for (const auto& p : nuclei.positions) t.push_back(tr.potential_at(p));
  return nuclei.z * pairwise_sum(t);
}

/// U = sum_{i<j} z^2 / |R_i - R_j|
inline double nuclear_repulsion(const NucleiConfig& nuclei) {
  nuclei.validate();
  std::vector<double> t;
  for (std::size_t i = 0; i < nuclei.size(); ++i)
    for (std::size_t j = i + 1; j < nuclei.size(); ++j)
      t.push_back(nuclei.z * nuclei.z / distance(nuclei.positions[i], nuclei.positions[j]));
  return pairwise_sum(t);
}

}  // namespace c2d
