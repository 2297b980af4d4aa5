#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ssd/density.hpp"
#include "ssd/grid.hpp"
#include "ssd/rng.hpp"

namespace ssd {

// How nonzero values are drawn.
struct GaussianSlab {};
struct TwoPointSlab {
  double magnitude;  // values are +/-magnitude with equal probability
};
using SlabMode = std::variant<GaussianSlab, TwoPointSlab>;

// Spike-and-slab signal prior: each element is nonzero with probability q,
// and nonzero values have standard deviation sigma_x under the Gaussian slab.
struct SpikeSlabPrior {
  double q = 0.0;
  double sigma_x = 0.0;
  SlabMode slab_mode = GaussianSlab{};

  // Throws on hard violations; q >= 0.5 is legal but outside the sparse
  // regime the analysis assumes, so it only warns.
  void validate(std::ostream* warn = nullptr) const {
    if (!(q > 0.0 && q < 1.0))
      throw std::invalid_argument("SpikeSlabPrior: q must lie in (0,1)");
    if (!(sigma_x > 0.0))
      throw std::invalid_argument("SpikeSlabPrior: sigma_x must be positive");
    if (const auto* tp = std::get_if<TwoPointSlab>(&slab_mode)) {
      if (!(tp->magnitude > 0.0))
        throw std::invalid_argument("SpikeSlabPrior: two-point magnitude must be positive");
    }
    if (q >= 0.5 && warn)
      *warn << "warning: mixing rate q=" << q
            << " is outside the sparse regime (q << 1)\n";
  }
};

// One realized signal with its support states.
struct SignalInstance {
  std::vector<double> values;
  std::vector<std::uint8_t> support;
  std::optional<int> probe_index;
};

inline std::vector<std::uint8_t> sample_support(const SpikeSlabPrior& prior,
                                                int n, Rng& rng) {
  prior.validate();
  if (n < 1) throw std::invalid_argument("sample_support: n must be >= 1");
  std::bernoulli_distribution on(prior.q);
  std::vector<std::uint8_t> s(static_cast<size_t>(n));
  for (auto& v : s) v = on(rng) ? 1 : 0;
  return s;
}

// Draws nonzero values for the given support. A designated probe element is
// forced to +/-probe_magnitude with a random sign; all other nonzeros follow
// the prior's slab mode. Zeros stay exactly zero.
inline SignalInstance sample_signal(const SpikeSlabPrior& prior,
                                    const std::vector<std::uint8_t>& support,
                                    std::optional<int> probe_index,
                                    std::optional<double> probe_magnitude,
                                    Rng& rng) {
  prior.validate();
  if (probe_index) {
    if (!probe_magnitude || !(*probe_magnitude > 0.0))
      throw std::invalid_argument("sample_signal: probe needs a positive magnitude");
    if (*probe_index < 0 || *probe_index >= static_cast<int>(support.size()))
      throw std::invalid_argument("sample_signal: probe_index out of range");
    if (!support[static_cast<size_t>(*probe_index)])
      throw std::invalid_argument("sample_signal: probe_index points at a zero-support position");
  }
  SignalInstance out;
  out.support = support;
  out.probe_index = probe_index;
  out.values.assign(support.size(), 0.0);
  std::normal_distribution<double> gauss(0.0, prior.sigma_x);
  std::bernoulli_distribution coin(0.5);
  for (size_t i = 0; i < support.size(); ++i) {
    if (!support[i]) continue;
    if (probe_index && static_cast<int>(i) == *probe_index) {
      out.values[i] = coin(rng) ? *probe_magnitude : -*probe_magnitude;
    } else if (const auto* tp = std::get_if<TwoPointSlab>(&prior.slab_mode)) {
      out.values[i] = coin(rng) ? tp->magnitude : -tp->magnitude;
    } else {
      out.values[i] = gauss(rng);
    }
  }
  return out;
}

// Grid representation of the spike-and-slab prior: mass 1-q at zero plus
// q * Normal(0, sigma_x^2) on the slab.
inline HybridDensity prior_density(const SpikeSlabPrior& prior,
                                   const GridSpec& grid) {
  prior.validate();
  if (grid.max_x() < 6.0 * prior.sigma_x)
    throw std::runtime_error("prior_density: grid must cover +/-6 sigma_x");
  HybridDensity slab(grid);
  try {
    // make_gaussian rejects truncated slab mass beyond 1e-6.
    slab = make_gaussian(grid, 0.0, prior.sigma_x);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(std::string("prior_density: grid too narrow (") +
                             e.what() + ")");
  }
  HybridDensity out(grid);
  for (int k = 0; k < grid.n_points; ++k)
    out.slab()[static_cast<size_t>(k)] = prior.q * slab.slab_at(k);
  out.set_spike_mass(1.0 - prior.q);
  out.normalize();
  return out;
}

}  // namespace ssd
