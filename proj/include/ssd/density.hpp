#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssd/fft.hpp"
#include "ssd/grid.hpp"

namespace ssd {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kMassTol = 1e-6;

inline double gaussian_pdf(double x, double mean, double std) {
  const double z = (x - mean) / std;
  return std::exp(-0.5 * z * z) / (std * std::sqrt(2.0 * kPi));
}

// One-dimensional density as an explicit point mass at zero plus a slab
// sampled on a uniform grid. The spike is kept as a separate scalar, never a
// fat grid bin, so the delta algebra in products and detector integrals is
// exact instead of resolution-dependent. Slab samples carry density units
// (1/x) with linear interpolation between nodes; integrals are trapezoidal.
class HybridDensity {
 public:
  explicit HybridDensity(GridSpec grid)
      : grid_(grid), slab_(static_cast<size_t>(grid.n_points), 0.0) {}

  static HybridDensity spike_only(GridSpec grid) {
    HybridDensity d(grid);
    d.spike_ = 1.0;
    return d;
  }

  const GridSpec& grid() const { return grid_; }
  double spike_mass() const { return spike_; }
  void set_spike_mass(double m) { spike_ = m; }

  const std::vector<double>& slab() const { return slab_; }
  std::vector<double>& slab() { return slab_; }
  double slab_at(int k) const { return slab_[static_cast<size_t>(k)]; }
  double slab_at_zero() const { return slab_[static_cast<size_t>(grid_.zero_index())]; }

  // Linear interpolation of the slab; zero outside the grid.
  double slab_interp(double x) const {
    const double dx = grid_.spacing();
    const double pos = (x - grid_.min_x()) / dx;
    if (pos < 0.0 || pos > grid_.n_points - 1) return 0.0;
    const int k = std::min(static_cast<int>(pos), grid_.n_points - 2);
    const double frac = pos - k;
    return slab_[k] * (1.0 - frac) + slab_[k + 1] * frac;
  }

  double slab_integral() const {
    double sum = 0.0;
    for (double v : slab_) sum += v;
    sum -= 0.5 * (slab_.front() + slab_.back());
    return sum * grid_.spacing();
  }

  double total_mass() const { return spike_ + slab_integral(); }

  bool is_normalized(double tol = kMassTol) const {
    return std::abs(total_mass() - 1.0) <= tol;
  }

  void normalize() {
    const double m = total_mass();
    if (!(m > 0.0) || !std::isfinite(m))
      throw std::runtime_error("HybridDensity::normalize: total mass is " +
                               std::to_string(m));
    const double inv = 1.0 / m;
    spike_ *= inv;
    for (double& v : slab_) v *= inv;
  }

  // Smallest node interval [lo, hi] holding all slab mass except a tail of at
  // most `tail_mass` on each side. Returns {0, 0} offsets for an empty slab.
  void effective_support(double tail_mass, double& lo, double& hi) const {
    const double dx = grid_.spacing();
    int l = 0, r = grid_.n_points - 1;
    double acc = 0.0;
    while (l < r) {
      const double step = 0.5 * (slab_[l] + slab_[l + 1]) * dx;
      if (acc + step > tail_mass) break;
      acc += step;
      ++l;
    }
    acc = 0.0;
    while (r > l) {
      const double step = 0.5 * (slab_[r] + slab_[r - 1]) * dx;
      if (acc + step > tail_mass) break;
      acc += step;
      --r;
    }
    lo = grid_.node(l);
    hi = grid_.node(r);
    if (spike_ > 0.0) {
      lo = std::min(lo, 0.0);
      hi = std::max(hi, 0.0);
    }
    if (lo > hi) lo = hi = 0.0;
  }

 private:
  GridSpec grid_;
  std::vector<double> slab_;
  double spike_ = 0.0;
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  double spike_mass = 0.0;
};

// Sampled normal density on the grid, normalized.
// Errors when the mean falls outside the grid or the std is below twice the
// grid spacing: both would silently truncate or alias mass.
inline HybridDensity make_gaussian(const GridSpec& grid, double mean,
                                   double std) {
  if (!(std > 0.0)) throw std::invalid_argument("make_gaussian: std must be positive");
  if (!grid.contains(mean))
    throw std::runtime_error("make_gaussian: mean " + std::to_string(mean) +
                             " outside grid [" + std::to_string(grid.min_x()) +
                             ", " + std::to_string(grid.max_x()) + "]");
  const double dx = grid.spacing();
  if (std < 2.0 * dx)
    throw std::runtime_error(
        "make_gaussian: std " + std::to_string(std) +
        " below 2*spacing; raise n_points or shrink half_width");
  HybridDensity d(grid);
  // Density below exp(-0.5*9.5^2) of the peak is left at exact zero.
  const double reach = 9.5 * std;
  const int k_lo = std::max(0, static_cast<int>(std::floor((mean - reach - grid.min_x()) / dx)));
  const int k_hi = std::min(grid.n_points - 1,
                            static_cast<int>(std::ceil((mean + reach - grid.min_x()) / dx)));
  for (int k = k_lo; k <= k_hi; ++k)
    d.slab()[static_cast<size_t>(k)] = gaussian_pdf(grid.node(k), mean, std);
  const double mass = d.slab_integral();
  if (mass < 1.0 - kMassTol)
    throw std::runtime_error("make_gaussian: grid truncates the density (mass " +
                             std::to_string(mass) + ")");
  d.normalize();
  return d;
}

inline void require_same_grid(const HybridDensity& a, const HybridDensity& b,
                              const char* who) {
  if (!(a.grid() == b.grid()))
    throw std::invalid_argument(std::string(who) + ": grid mismatch");
}

// Pointwise product of two hybrid densities, renormalized.
//
// Spike algebra treats the point mass exactly: spike x slab picks the slab
// value at zero, and spike x spike uses the bin-delta convention delta(0) =
// 1/spacing so the result stays in density units. Annihilation (zero total
// mass) is an error.
inline HybridDensity product(const HybridDensity& a, const HybridDensity& b) {
  require_same_grid(a, b, "product");
  HybridDensity out(a.grid());
  const size_t n = a.slab().size();
  for (size_t k = 0; k < n; ++k) out.slab()[k] = a.slab()[k] * b.slab()[k];
  const double dx = a.grid().spacing();
  out.set_spike_mass(a.spike_mass() * b.slab_at_zero() +
                     b.spike_mass() * a.slab_at_zero() +
                     a.spike_mass() * b.spike_mass() / dx);
  const double m = out.total_mass();
  if (!(m > 0.0) || !std::isfinite(m))
    throw std::runtime_error("product: all probability mass annihilated");
  out.normalize();
  return out;
}

namespace detail {

// Characteristic-function samples of a density on an extended circular
// window of n_ext nodes (same spacing as the source grid). Array layout puts
// x = 0 at index 0 with negative x wrapped to the top half, which is the
// layout FFT convolution expects.
inline std::vector<std::complex<double>> density_spectrum(
    const HybridDensity& d, int n_ext) {
  const GridSpec& g = d.grid();
  const int n = g.n_points;
  const int c = g.zero_index();
  std::vector<double> rot(static_cast<size_t>(n_ext), 0.0);
  for (int t = 0; t < n; ++t) {
    const int m = ((t - c) % n_ext + n_ext) % n_ext;
    rot[static_cast<size_t>(m)] = d.slab()[static_cast<size_t>(t)];
  }
  std::vector<std::complex<double>> spec;
  FftPlans::instance().forward_r2c(rot, spec);
  const double dx = g.spacing();
  for (auto& v : spec) v = v * dx + d.spike_mass();
  return spec;
}

inline void multiply_gaussian_cf(std::vector<std::complex<double>>& spec,
                                 double sigma, int n_ext, double dx) {
  if (sigma <= 0.0) return;
  const double w = 2.0 * kPi * kPi * sigma * sigma;
  for (size_t k = 0; k < spec.size(); ++k) {
    const double f = static_cast<double>(k) / (n_ext * dx);
    spec[k] *= std::exp(-w * f * f);
  }
}

// Inverse of density_spectrum: slab samples in centered layout (index t is
// x = (t - n_ext/2)*dx). Small negative ripple from finite precision is
// clamped to zero.
inline std::vector<double> spectrum_to_slab(
    std::vector<std::complex<double>> spec, int n_ext, double dx) {
  std::vector<double> rot;
  FftPlans::instance().inverse_c2r(std::move(spec), n_ext, rot);
  std::vector<double> out(static_cast<size_t>(n_ext), 0.0);
  const int c = n_ext / 2;
  for (int t = 0; t < n_ext; ++t) {
    const int m = ((t - c) % n_ext + n_ext) % n_ext;
    out[static_cast<size_t>(t)] = std::max(0.0, rot[static_cast<size_t>(m)] / dx);
  }
  return out;
}

struct ConvPlan {
  int n_ext = 0;       // extended window length in nodes
  double lo = 0.0;     // effective support of the result
  double hi = 0.0;
};

// Chooses the extended FFT window so the linear-convolution support of all
// inputs plus the noise reach fits without wrap-around. Inputs are trimmed to
// effective support at tail mass 1e-9 per side, so the wrapped residue is
// below the 1e-6 mass-preservation budget.
inline ConvPlan plan_convolution(const std::vector<const HybridDensity*>& in,
                                 double noise_std, const GridSpec& grid,
                                 int max_factor = 8) {
  double lo = 0.0, hi = 0.0;
  for (const HybridDensity* d : in) {
    double l = 0.0, h = 0.0;
    d->effective_support(1e-9, l, h);
    lo += l;
    hi += h;
  }
  lo -= 8.0 * noise_std;
  hi += 8.0 * noise_std;
  const double dx = grid.spacing();
  for (int factor = 2; factor <= max_factor; factor *= 2) {
    const int n_ext = factor * grid.n_points;
    const double half = 0.5 * n_ext * dx;
    if (lo >= -half && hi <= half - dx) return ConvPlan{n_ext, lo, hi};
  }
  throw std::runtime_error(
      "convolve_sum: combined support exceeds the largest FFT window; "
      "widen the grid");
}

}  // namespace detail

// Density of the sum of independent variables drawn from the given densities
// plus centered Gaussian noise, windowed back onto the common grid.
// FFT-based linear convolution; mass falling outside the grid window beyond
// the 1e-6 budget is an error rather than silently dropped.
inline HybridDensity convolve_sum(const std::vector<const HybridDensity*>& in,
                                  double noise_std) {
  if (noise_std < 0.0)
    throw std::invalid_argument("convolve_sum: negative noise_std");
  if (in.empty())
    throw std::invalid_argument("convolve_sum: empty input list");
  const GridSpec grid = in.front()->grid();
  for (const HybridDensity* d : in) require_same_grid(*in.front(), *d, "convolve_sum");

  const detail::ConvPlan plan = detail::plan_convolution(in, noise_std, grid);
  const double dx = grid.spacing();

  std::vector<std::complex<double>> acc(static_cast<size_t>(plan.n_ext / 2 + 1),
                                        {1.0, 0.0});
  double pure_spike = 1.0;
  for (const HybridDensity* d : in) {
    const auto spec = detail::density_spectrum(*d, plan.n_ext);
    for (size_t k = 0; k < acc.size(); ++k) acc[k] *= spec[k];
    pure_spike *= d->spike_mass();
  }

  HybridDensity out(grid);
  if (noise_std > 0.0) {
    detail::multiply_gaussian_cf(acc, noise_std, plan.n_ext, dx);
  } else {
    // The product of pure point masses stays a point mass; remove its flat
    // spectrum so the inverse transform only carries the continuous part.
    for (auto& v : acc) v -= pure_spike;
    out.set_spike_mass(pure_spike);
  }
  const std::vector<double> ext = detail::spectrum_to_slab(std::move(acc), plan.n_ext, dx);

  const int offset = plan.n_ext / 2 - grid.zero_index();
  for (int t = 0; t < grid.n_points; ++t)
    out.slab()[static_cast<size_t>(t)] = ext[static_cast<size_t>(t + offset)];

  const double mass = out.total_mass();
  if (std::abs(mass - 1.0) > kMassTol)
    throw std::runtime_error(
        "convolve_sum: mass not preserved within 1e-6 (got " +
        std::to_string(mass) + "); result extends beyond the grid");
  out.normalize();
  return out;
}

inline HybridDensity convolve_sum(const std::vector<HybridDensity>& in,
                                  double noise_std) {
  std::vector<const HybridDensity*> ptrs;
  ptrs.reserve(in.size());
  for (const auto& d : in) ptrs.push_back(&d);
  return convolve_sum(ptrs, noise_std);
}

// Trapezoidal mean/variance including the spike at zero. Rejects
// unnormalized input.
inline Moments moments(const HybridDensity& d) {
  if (!d.is_normalized())
    throw std::invalid_argument("moments: density not normalized");
  const GridSpec& g = d.grid();
  const double dx = g.spacing();
  double m1 = 0.0, m2 = 0.0;
  const int n = g.n_points;
  for (int k = 0; k < n; ++k) {
    const double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
    const double x = g.node(k);
    const double p = d.slab_at(k) * w * dx;
    m1 += x * p;
    m2 += x * x * p;
  }
  return Moments{m1, m2 - m1 * m1, d.spike_mass()};
}

// L1 distance: trapezoidal integral of |slab difference| plus |spike
// difference|. Symmetric, zero iff equal.
inline double l1_distance(const HybridDensity& a, const HybridDensity& b) {
  require_same_grid(a, b, "l1_distance");
  const int n = a.grid().n_points;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
    sum += w * std::abs(a.slab_at(k) - b.slab_at(k));
  }
  return sum * a.grid().spacing() + std::abs(a.spike_mass() - b.spike_mass());
}

// Two-column CSV dump with the spike mass carried as a header comment.
inline void write_density_csv(const HybridDensity& d, std::ostream& os) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", d.spike_mass());
  os << "# spike_mass=" << buf << "\n";
  os << "x,density\n";
  for (int k = 0; k < d.grid().n_points; ++k) {
    char line[128];
    std::snprintf(line, sizeof(line), "%.17g,%.17g\n", d.grid().node(k),
                  d.slab_at(k));
    os << line;
  }
}

}  // namespace ssd
