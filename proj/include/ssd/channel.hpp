#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ssd/density.hpp"
#include "ssd/grid.hpp"
#include "ssd/signal_model.hpp"

namespace ssd {

// One point of the decoupled scalar channel: a support element of true value
// x0 observed through L unit-weight measurements at noise level sigma_w.
struct ChannelPoint {
  double x0 = 0.0;
  double sigma_w = 0.0;
  int l = 1;
  SpikeSlabPrior prior;
};

// Closed-form marginal posterior of the decoupled channel: a spike-and-slab
// density rho * Normal(mu, theta2) + (1 - rho) * delta_0. c1 and c2 are the
// normalization constants of the spike and slab branches; log versions are
// kept so extreme noise levels stay finite.
struct PosteriorParams {
  double rho = 0.0;
  double mu = 0.0;
  double theta2 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double log_c1 = 0.0;
  double log_c2 = 0.0;
};

// Marginal posterior parameters for sigma_w > 0.
//
// With a2 = sigma_w^2/L and s2 = sigma_x^2:
//   mu     = x0 * s2 / (s2 + a2)
//   theta2 = s2 * a2 / (s2 + a2)
//   c1     = exp(-x0^2 / (2 a2))        / sqrt(2 pi a2)
//   c2     = exp(-x0^2 / (2 (s2 + a2))) / sqrt(2 pi (s2 + a2))
//   rho    = q c2 / (q c2 + (1 - q) c1)
//
// The sign of the exponent in c2 is negative: it is the value of the
// Gaussian product identity N(x;0,s2) * N(x;x0,a2) = N(x0;0,s2+a2) *
// N(x;mu,theta2) at the slab branch, and oracle_posterior() below verifies
// the resulting density numerically (see tests and the selftest command).
inline PosteriorParams posterior_params(const ChannelPoint& p) {
  p.prior.validate();
  if (!(p.sigma_w > 0.0))
    throw std::invalid_argument(
        "posterior_params: sigma_w must be > 0; use limit_params for the "
        "noiseless limit");
  if (p.l < 1) throw std::invalid_argument("posterior_params: L must be >= 1");
  const double a2 = p.sigma_w * p.sigma_w / p.l;
  const double s2 = p.prior.sigma_x * p.prior.sigma_x;
  PosteriorParams out;
  out.mu = p.x0 * s2 / (s2 + a2);
  out.theta2 = s2 * a2 / (s2 + a2);
  out.log_c1 = -p.x0 * p.x0 / (2.0 * a2) - 0.5 * std::log(2.0 * kPi * a2);
  out.log_c2 = -p.x0 * p.x0 / (2.0 * (s2 + a2)) - 0.5 * std::log(2.0 * kPi * (s2 + a2));
  out.c1 = std::exp(out.log_c1);
  out.c2 = std::exp(out.log_c2);
  const double q = p.prior.q;
  // rho = logistic(log(q/(1-q)) + log_c2 - log_c1), evaluated stably.
  const double t = std::log(q / (1.0 - q)) + out.log_c2 - out.log_c1;
  out.rho = t >= 0.0 ? 1.0 / (1.0 + std::exp(-t))
                     : std::exp(t) / (1.0 + std::exp(t));
  return out;
}

enum class NoiseLimit { noiseless, infinite_noise };

// Exact limits of the posterior parameters: sigma_w -> 0 collapses onto the
// true value (a delta at x0, or the pure spike when x0 = 0); sigma_w -> inf
// returns the prior parameters (q, 0, sigma_x^2).
inline PosteriorParams limit_params(const ChannelPoint& p, NoiseLimit which) {
  p.prior.validate();
  PosteriorParams out;
  if (which == NoiseLimit::noiseless) {
    if (p.x0 != 0.0) {
      out.rho = 1.0;
      out.mu = p.x0;
      out.theta2 = 0.0;
    } else {
      out.rho = 0.0;
      out.mu = 0.0;
      out.theta2 = 0.0;
    }
    out.c1 = p.x0 == 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    out.c2 = 0.0;
    out.log_c1 = p.x0 == 0.0 ? std::numeric_limits<double>::infinity()
                             : -std::numeric_limits<double>::infinity();
    out.log_c2 = -std::numeric_limits<double>::infinity();
  } else {
    out.rho = p.prior.q;
    out.mu = 0.0;
    out.theta2 = p.prior.sigma_x * p.prior.sigma_x;
    out.c1 = 0.0;
    out.c2 = 0.0;
    out.log_c1 = -std::numeric_limits<double>::infinity();
    out.log_c2 = -std::numeric_limits<double>::infinity();
  }
  return out;
}

// Samples the closed-form posterior onto a grid.
inline HybridDensity posterior_density(const PosteriorParams& params,
                                       const GridSpec& grid) {
  if (!(params.rho >= 0.0 && params.rho <= 1.0))
    throw std::invalid_argument("posterior_density: rho outside [0,1]");
  HybridDensity out(grid);
  out.set_spike_mass(1.0 - params.rho);
  if (params.rho > 0.0) {
    const double theta = std::sqrt(params.theta2);
    if (theta < 2.0 * grid.spacing())
      throw std::runtime_error(
          "posterior_density: slab std " + std::to_string(theta) +
          " below 2*spacing; the posterior is too narrow for this grid, "
          "raise n_points");
    const HybridDensity slab = make_gaussian(grid, params.mu, theta);
    for (int k = 0; k < grid.n_points; ++k)
      out.slab()[static_cast<size_t>(k)] = params.rho * slab.slab_at(k);
  }
  out.normalize();
  return out;
}

// Independent numeric oracle for posterior_params: evaluates
// eta[ prior(x) * prod_{j=1..L} Normal(x; x0, sigma_w^2) ] directly on the
// grid with pointwise slab products and exact spike algebra. Every closed
// form above must match this density in L1.
inline HybridDensity oracle_posterior(const ChannelPoint& p,
                                      const GridSpec& grid) {
  if (!(p.sigma_w > 0.0))
    throw std::invalid_argument("oracle_posterior: sigma_w must be > 0");
  HybridDensity acc = prior_density(p.prior, grid);
  for (int j = 0; j < p.l; ++j) {
    const HybridDensity msg = make_gaussian(grid, p.x0, p.sigma_w);
    acc = product(acc, msg);
  }
  return acc;
}

}  // namespace ssd
