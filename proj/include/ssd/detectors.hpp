#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ssd/channel.hpp"
#include "ssd/density.hpp"
#include "ssd/signal_model.hpp"

namespace ssd {

enum class Detector { bht, csbp };

// Detector selection. CS-BP compares a continuous density against a point
// mass, which needs a convention: the spike is spread over one grid bin of
// width delta_convention. Every CS-BP result is therefore reported together
// with its delta.
struct DetectorKind {
  Detector kind = Detector::bht;
  double delta_convention = 0.0;  // required for csbp
};

// h > 0 decides H1 (supportive); ties go to H0, the failure side.
struct DetectionResult {
  double h_value = 0.0;
  bool support_detected = false;
};

inline DetectionResult make_result(double h) {
  return DetectionResult{h, h > 0.0};
}

namespace detail {
inline double clip_rho(double rho) {
  return std::clamp(rho, 1e-300, 1.0 - 1e-16);
}
}  // namespace detail

// Binary MAP hypothesis test on a spike-and-slab posterior. The two
// prior-ratio integrals collapse exactly to rho/q and (1-rho)/(1-q), so
//   h = log(q/(1-q)) + log((rho/q) / ((1-rho)/(1-q))) = log(rho/(1-rho)).
// The reduction is cross-checked against h_bht_grid below before anything
// relies on it (see tests). Decision boundary: rho = 1/2.
inline DetectionResult h_bht_analytic(const PosteriorParams& params,
                                      double /*q*/ = 0.0) {
  const double rho = detail::clip_rho(params.rho);
  return make_result(std::log(rho) - std::log1p(-rho));
}

// Same reduction applied to any posterior known only through its spike mass.
inline DetectionResult h_bht_from_spike_mass(double spike_mass) {
  const double rho = detail::clip_rho(1.0 - spike_mass);
  return make_result(std::log(rho) - std::log1p(-rho));
}

// Direct numeric evaluation of the two BHT integrals with the point mass
// regularized as Normal(0, epsilon^2) inside both the prior and the
// posterior. Converges to h_bht_analytic as epsilon -> 0 for spike-and-slab
// posteriors (first order in epsilon / slab width).
//
// Writing fs = Normal(0, sigma_x^2), Ne = Normal(0, eps^2),
// f = q fs + (1-q) Ne, w1 = fs/f, w0 = Ne/f, post = slab + p0 Ne:
//   numerator   = int w1 post = (A - (1-q) B)/q + p0 E
//   denominator = int w0 post = B + p0 D
// with A the slab mass and B, D, E local integrals concentrated where Ne is
// non-negligible; these are evaluated on a fine Simpson subgrid so the grid
// spacing never limits them.
inline DetectionResult h_bht_grid(const HybridDensity& posterior,
                                  const SpikeSlabPrior& prior,
                                  double epsilon) {
  prior.validate();
  const double dx = posterior.grid().spacing();
  if (!(epsilon > 0.0) || epsilon > dx)
    throw std::invalid_argument("h_bht_grid: epsilon must lie in (0, spacing]");
  if (!posterior.is_normalized())
    throw std::invalid_argument("h_bht_grid: posterior not normalized");

  const double q = prior.q;
  const double s = prior.sigma_x;
  const double p0 = posterior.spike_mass();
  const double a_mass = posterior.slab_integral();

  const double reach = 16.0 * epsilon;
  const int segments = 2000;  // composite Simpson, even count
  const double h_step = 2.0 * reach / segments;
  double b_int = 0.0, d_int = 0.0, e_int = 0.0;
  for (int k = 0; k <= segments; ++k) {
    const double x = -reach + k * h_step;
    const double ne = gaussian_pdf(x, 0.0, epsilon);
    const double fs = gaussian_pdf(x, 0.0, s);
    const double f = q * fs + (1.0 - q) * ne;
    const double w0 = ne / f;
    const double w1 = fs / f;
    const double simpson = (k == 0 || k == segments) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    b_int += simpson * w0 * posterior.slab_interp(x);
    d_int += simpson * w0 * ne;
    e_int += simpson * w1 * ne;
  }
  const double scale = h_step / 3.0;
  b_int *= scale;
  d_int *= scale;
  e_int *= scale;

  const double numerator =
      std::max((a_mass - (1.0 - q) * b_int) / q + p0 * e_int, 1e-300);
  const double denominator = std::max(b_int + p0 * d_int, 1e-300);
  return make_result(std::log(q / (1.0 - q)) +
                     std::log(numerator) - std::log(denominator));
}

// CS-BP detection on the closed form: the MAP point of the slab is mu, and
// the density at zero is spike/delta + slab(0).
inline DetectionResult h_csbp(const PosteriorParams& params, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("h_csbp: delta must be positive");
  const double rho = params.rho;
  double slab_peak, slab_at_zero;
  if (rho <= 0.0) {
    return make_result(-std::numeric_limits<double>::infinity());
  }
  if (params.theta2 <= 0.0) {
    // Degenerate slab (noiseless limit): a delta at mu beats any finite
    // density unless mu is itself zero.
    return make_result(params.mu == 0.0
                           ? -std::numeric_limits<double>::infinity()
                           : std::numeric_limits<double>::infinity());
  }
  const double theta = std::sqrt(params.theta2);
  slab_peak = rho * gaussian_pdf(params.mu, params.mu, theta);
  slab_at_zero = rho * gaussian_pdf(0.0, params.mu, theta);
  const double zero_density = (1.0 - rho) / delta + slab_at_zero;
  return make_result(std::log(slab_peak) - std::log(zero_density));
}

// CS-BP detection on a sampled posterior. The MAP point is the slab argmax
// over grid nodes; delta defaults to the sampling grid spacing, matching
// what a sampled-PDF implementation computes.
inline DetectionResult h_csbp(const HybridDensity& posterior, double delta = 0.0) {
  if (delta == 0.0) delta = posterior.grid().spacing();
  if (!(delta > 0.0)) throw std::invalid_argument("h_csbp: delta must be positive");
  if (!posterior.is_normalized())
    throw std::invalid_argument("h_csbp: posterior not normalized");
  double peak = 0.0;
  for (int k = 0; k < posterior.grid().n_points; ++k)
    peak = std::max(peak, posterior.slab_at(k));
  const double zero_density =
      posterior.spike_mass() / delta + posterior.slab_at_zero();
  if (peak <= 0.0)
    return make_result(-std::numeric_limits<double>::infinity());
  return make_result(std::log(peak) - std::log(zero_density));
}

inline DetectionResult detect(const HybridDensity& posterior,
                              const DetectorKind& kind,
                              const SpikeSlabPrior& /*prior*/) {
  if (kind.kind == Detector::bht)
    return h_bht_from_spike_mass(posterior.spike_mass());
  return h_csbp(posterior, kind.delta_convention);
}

inline DetectionResult detect(const PosteriorParams& params,
                              const DetectorKind& kind) {
  if (kind.kind == Detector::bht) return h_bht_analytic(params);
  return h_csbp(params, kind.delta_convention);
}

// Elementwise support detection over per-element posteriors.
inline std::vector<std::uint8_t> detect_support(
    const std::vector<HybridDensity>& posteriors, const DetectorKind& kind,
    const SpikeSlabPrior& prior) {
  std::vector<std::uint8_t> out(posteriors.size());
  for (size_t i = 0; i < posteriors.size(); ++i)
    out[i] = detect(posteriors[i], kind, prior).support_detected ? 1 : 0;
  return out;
}

inline std::vector<std::uint8_t> detect_support(
    const std::vector<PosteriorParams>& params, const DetectorKind& kind) {
  std::vector<std::uint8_t> out(params.size());
  for (size_t i = 0; i < params.size(); ++i)
    out[i] = detect(params[i], kind).support_detected ? 1 : 0;
  return out;
}

}  // namespace ssd
