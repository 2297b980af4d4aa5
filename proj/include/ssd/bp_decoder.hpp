#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ssd/channel.hpp"
#include "ssd/density.hpp"
#include "ssd/grid.hpp"
#include "ssd/measurement.hpp"
#include "ssd/signal_model.hpp"

namespace ssd {

struct BpConfig {
  int max_iters = 20;
  double tol = 1e-4;      // convergence threshold on max per-edge L1 change
  double damping = 0.0;   // in [0,1); blend with the previous message
  GridSpec grid;

  void validate() const {
    if (max_iters < 1) throw std::invalid_argument("BpConfig: max_iters >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("BpConfig: tol > 0");
    if (damping < 0.0 || damping >= 1.0)
      throw std::invalid_argument("BpConfig: damping in [0,1)");
  }
};

struct BpDiagnostics {
  int iterations = 0;
  double final_delta = 0.0;
  bool converged = false;
  int annihilated_updates = 0;
  // (iteration, max message delta) per iteration; the residual message
  // change doubles as an empirical proxy for the remaining cross-element
  // interference.
  std::vector<std::pair<int, double>> trace;
};

struct BpResult {
  std::vector<HybridDensity> beliefs;
  BpDiagnostics diag;
};

namespace detail {

// Exact deltas break grid convolution, so the effective check-noise width
// never drops below half a grid spacing.
inline double effective_noise(double sigma_w, const GridSpec& grid) {
  return std::max(sigma_w, 0.5 * grid.spacing());
}

inline const std::vector<double>& noise_cf(double sigma, int n_ext, double dx,
                                           std::vector<double>& buf) {
  buf.resize(static_cast<size_t>(n_ext / 2 + 1));
  const double w = 2.0 * kPi * kPi * sigma * sigma;
  for (size_t k = 0; k < buf.size(); ++k) {
    const double f = static_cast<double>(k) / (n_ext * dx);
    buf[k] = std::exp(-w * f * f);
  }
  return buf;
}

// Reads the convolution result (centered layout on n_ext nodes) at y - u for
// every node u of the base grid, producing a normalized likelihood density
// of the excluded variable.
inline HybridDensity shift_reflect(const std::vector<double>& ext, int n_ext,
                                   const GridSpec& grid, double y) {
  const double dx = grid.spacing();
  const double half = 0.5 * n_ext * dx;
  HybridDensity out(grid);
  for (int t = 0; t < grid.n_points; ++t) {
    const double x = y - grid.node(t);
    const double pos = (x + half) / dx;
    if (pos < 0.0 || pos > n_ext - 1) continue;
    const int k = std::min(static_cast<int>(pos), n_ext - 2);
    const double frac = pos - k;
    out.slab()[static_cast<size_t>(t)] =
        ext[static_cast<size_t>(k)] * (1.0 - frac) +
        ext[static_cast<size_t>(k + 1)] * frac;
  }
  if (!(out.total_mass() > 0.0))
    throw std::runtime_error(
        "check_update: measurement value falls outside the representable "
        "window; widen the grid");
  out.normalize();
  return out;
}

}  // namespace detail

// Check-to-variable message: the density of y_j minus the sum of the other
// neighbors minus the noise, expressed as a likelihood of the excluded
// variable: U(u) is the sum-density evaluated at y_j - u.
inline HybridDensity check_update(double y_j,
                                  const std::vector<const HybridDensity*>& others,
                                  double sigma_w, const GridSpec& grid) {
  if (sigma_w < 0.0) throw std::invalid_argument("check_update: negative sigma_w");
  const double sigma = detail::effective_noise(sigma_w, grid);
  const detail::ConvPlan plan = detail::plan_convolution(others, sigma, grid);
  const double dx = grid.spacing();
  std::vector<std::complex<double>> acc(static_cast<size_t>(plan.n_ext / 2 + 1),
                                        {1.0, 0.0});
  for (const HybridDensity* d : others) {
    require_same_grid(*others.front(), *d, "check_update");
    const auto spec = detail::density_spectrum(*d, plan.n_ext);
    for (size_t k = 0; k < acc.size(); ++k) acc[k] *= spec[k];
  }
  detail::multiply_gaussian_cf(acc, sigma, plan.n_ext, dx);
  const std::vector<double> ext =
      detail::spectrum_to_slab(std::move(acc), plan.n_ext, dx);
  return detail::shift_reflect(ext, plan.n_ext, grid, y_j);
}

// Variable-to-check message: normalized product of the prior density with the
// incoming check messages, optionally damped toward the previous message.
inline HybridDensity variable_update(const HybridDensity& prior_density,
                                     const std::vector<const HybridDensity*>& incoming,
                                     double damping = 0.0,
                                     const HybridDensity* previous = nullptr) {
  HybridDensity acc = prior_density;
  for (const HybridDensity* u : incoming) acc = product(acc, *u);
  if (damping > 0.0 && previous) {
    require_same_grid(acc, *previous, "variable_update");
    for (int k = 0; k < acc.grid().n_points; ++k)
      acc.slab()[static_cast<size_t>(k)] =
          (1.0 - damping) * acc.slab_at(k) + damping * previous->slab_at(k);
    acc.set_spike_mass((1.0 - damping) * acc.spike_mass() +
                       damping * previous->spike_mass());
  }
  return acc;
}

// Flooding-schedule belief propagation over the bipartite graph of the
// matrix. Returns per-element marginal posteriors; non-convergence is a
// flagged diagnostic, not an exception.
//
// Check messages are computed per check with leave-one-out spectral products
// (one forward and one inverse FFT per edge and iteration), which matches
// check_update() up to floating-point association order.
inline BpResult run_bp(const SparseBinaryMatrix& matrix,
                       const std::vector<double>& y,
                       const SpikeSlabPrior& prior, double sigma_w,
                       const BpConfig& cfg) {
  cfg.validate();
  if (static_cast<int>(y.size()) != matrix.rows())
    throw std::invalid_argument("run_bp: y length does not match matrix rows");
  if (sigma_w < 0.0) throw std::invalid_argument("run_bp: negative sigma_w");

  const GridSpec grid = cfg.grid;
  const int n = matrix.cols();
  const int l = matrix.column_weight();
  const int n_edges = n * l;
  const double dx = grid.spacing();
  const double sigma = detail::effective_noise(sigma_w, grid);

  // Edge e = i*l + a is the a-th entry of column i; per-check edge lists are
  // rebuilt once.
  std::vector<std::vector<int>> check_edges(static_cast<size_t>(matrix.rows()));
  for (int i = 0; i < n; ++i) {
    const auto& rows = matrix.column(i);
    for (int a = 0; a < l; ++a)
      check_edges[static_cast<size_t>(rows[static_cast<size_t>(a)])].push_back(i * l + a);
  }

  const HybridDensity prior_d = prior_density(prior, grid);
  std::vector<HybridDensity> v_msg(static_cast<size_t>(n_edges), prior_d);
  std::vector<HybridDensity> u_msg(static_cast<size_t>(n_edges), HybridDensity(grid));
  std::vector<HybridDensity> v_next = v_msg;

  BpResult result{{}, {}};
  BpDiagnostics& diag = result.diag;

  std::vector<std::vector<std::complex<double>>> spectra;
  std::vector<std::vector<std::complex<double>>> prefix, suffix;
  std::vector<double> noise_buf;
  std::vector<const HybridDensity*> gather;

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    // Check pass.
    for (int j = 0; j < matrix.rows(); ++j) {
      const auto& edges = check_edges[static_cast<size_t>(j)];
      const int deg = static_cast<int>(edges.size());
      if (deg == 0) continue;

      gather.clear();
      for (int e : edges) gather.push_back(&v_msg[static_cast<size_t>(e)]);
      const detail::ConvPlan plan = detail::plan_convolution(gather, sigma, grid);
      const size_t n_bins = static_cast<size_t>(plan.n_ext / 2 + 1);

      spectra.assign(static_cast<size_t>(deg), {});
      for (int k = 0; k < deg; ++k)
        spectra[static_cast<size_t>(k)] =
            detail::density_spectrum(*gather[static_cast<size_t>(k)], plan.n_ext);

      prefix.assign(static_cast<size_t>(deg + 1),
                    std::vector<std::complex<double>>(n_bins, {1.0, 0.0}));
      suffix.assign(static_cast<size_t>(deg + 1),
                    std::vector<std::complex<double>>(n_bins, {1.0, 0.0}));
      for (int k = 0; k < deg; ++k)
        for (size_t b = 0; b < n_bins; ++b)
          prefix[static_cast<size_t>(k + 1)][b] =
              prefix[static_cast<size_t>(k)][b] * spectra[static_cast<size_t>(k)][b];
      for (int k = deg - 1; k >= 0; --k)
        for (size_t b = 0; b < n_bins; ++b)
          suffix[static_cast<size_t>(k)][b] =
              suffix[static_cast<size_t>(k + 1)][b] * spectra[static_cast<size_t>(k)][b];

      const auto& cf = detail::noise_cf(sigma, plan.n_ext, dx, noise_buf);
      std::vector<std::complex<double>> p(n_bins);
      for (int k = 0; k < deg; ++k) {
        for (size_t b = 0; b < n_bins; ++b)
          p[b] = prefix[static_cast<size_t>(k)][b] *
                 suffix[static_cast<size_t>(k + 1)][b] * cf[b];
        const std::vector<double> ext =
            detail::spectrum_to_slab(p, plan.n_ext, dx);
        u_msg[static_cast<size_t>(edges[static_cast<size_t>(k)])] =
            detail::shift_reflect(ext, plan.n_ext, grid,
                                  y[static_cast<size_t>(j)]);
      }
    }

    // Variable pass.
    double max_delta = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < l; ++a) {
        const int e = i * l + a;
        gather.clear();
        for (int b = 0; b < l; ++b)
          if (b != a) gather.push_back(&u_msg[static_cast<size_t>(i * l + b)]);
        try {
          v_next[static_cast<size_t>(e)] = variable_update(
              prior_d, gather, cfg.damping, &v_msg[static_cast<size_t>(e)]);
        } catch (const std::runtime_error&) {
          // Mass annihilation: keep the previous message and flag it.
          v_next[static_cast<size_t>(e)] = v_msg[static_cast<size_t>(e)];
          ++diag.annihilated_updates;
        }
        max_delta = std::max(max_delta,
                             l1_distance(v_next[static_cast<size_t>(e)],
                                         v_msg[static_cast<size_t>(e)]));
      }
    }
    std::swap(v_msg, v_next);

    diag.iterations = iter;
    diag.final_delta = max_delta;
    diag.trace.emplace_back(iter, max_delta);
    if (max_delta < cfg.tol) {
      diag.converged = true;
      break;
    }
  }

  // Final beliefs fuse the prior with all incoming messages.
  result.beliefs.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    gather.clear();
    for (int a = 0; a < l; ++a)
      gather.push_back(&u_msg[static_cast<size_t>(i * l + a)]);
    try {
      result.beliefs.push_back(variable_update(prior_d, gather));
    } catch (const std::runtime_error&) {
      result.beliefs.push_back(prior_d);
      ++diag.annihilated_updates;
    }
  }
  return result;
}

// Exact marginals on tiny instances by support-pattern enumeration: the
// independent oracle for run_bp. Pattern weights use the marginal likelihood
// of y under covariance sigma_w^2 I + sigma_x^2 Phi_s Phi_s^T; conditional
// slab marginals are Gaussian and sampled in closed form.
inline std::vector<HybridDensity> brute_force_posterior(
    const SparseBinaryMatrix& matrix, const std::vector<double>& y,
    const SpikeSlabPrior& prior, double sigma_w, const GridSpec& grid) {
  prior.validate();
  const int n = matrix.cols();
  const int m = matrix.rows();
  if (n > 12)
    throw std::invalid_argument("brute_force_posterior: N must be <= 12");
  if (!(sigma_w > 0.0))
    throw std::invalid_argument("brute_force_posterior: sigma_w must be > 0");
  if (static_cast<int>(y.size()) != m)
    throw std::invalid_argument("brute_force_posterior: y length mismatch");

  const double s2 = prior.sigma_x * prior.sigma_x;
  const double w2 = sigma_w * sigma_w;
  const double logq = std::log(prior.q);
  const double log1mq = std::log1p(-prior.q);

  Eigen::VectorXd yv(m);
  for (int j = 0; j < m; ++j) yv(j) = y[static_cast<size_t>(j)];

  struct SlabTerm {
    double log_w;
    double mean;
    double var;
  };
  std::vector<double> spike_logw_max(static_cast<size_t>(n),
                                     -std::numeric_limits<double>::infinity());
  std::vector<std::vector<double>> spike_logw(static_cast<size_t>(n));
  std::vector<std::vector<SlabTerm>> slab_terms(static_cast<size_t>(n));
  double max_logw = -std::numeric_limits<double>::infinity();

  const std::uint32_t n_patterns = 1u << n;
  for (std::uint32_t s = 0; s < n_patterns; ++s) {
    std::vector<int> active;
    for (int i = 0; i < n; ++i)
      if (s & (1u << i)) active.push_back(i);
    const int k = static_cast<int>(active.size());

    double log_w = k * logq + (n - k) * log1mq;
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    if (k == 0) {
      // y is pure noise.
      double quad = 0.0;
      for (int j = 0; j < m; ++j) quad += yv(j) * yv(j) / w2;
      log_w += -0.5 * (m * std::log(2.0 * kPi) + m * std::log(w2) + quad);
    } else {
      Eigen::MatrixXd a(m, k);
      a.setZero();
      for (int c = 0; c < k; ++c)
        for (int j : matrix.column(active[static_cast<size_t>(c)]))
          a(j, c) = 1.0;
      Eigen::MatrixXd cov_y =
          w2 * Eigen::MatrixXd::Identity(m, m) + s2 * (a * a.transpose());
      Eigen::LLT<Eigen::MatrixXd> llt(cov_y);
      const Eigen::VectorXd sol = llt.solve(yv);
      double logdet = 0.0;
      for (int j = 0; j < m; ++j) logdet += std::log(llt.matrixL()(j, j));
      logdet *= 2.0;
      log_w += -0.5 * (m * std::log(2.0 * kPi) + logdet + yv.dot(sol));

      Eigen::MatrixXd precision =
          Eigen::MatrixXd::Identity(k, k) / s2 + (a.transpose() * a) / w2;
      cov = precision.llt().solve(Eigen::MatrixXd::Identity(k, k));
      mean = cov * (a.transpose() * yv) / w2;
    }
    max_logw = std::max(max_logw, log_w);

    for (int i = 0; i < n; ++i) {
      if (!(s & (1u << i))) {
        spike_logw[static_cast<size_t>(i)].push_back(log_w);
      }
    }
    for (int c = 0; c < k; ++c) {
      slab_terms[static_cast<size_t>(active[static_cast<size_t>(c)])].push_back(
          SlabTerm{log_w, mean(c), cov(c, c)});
    }
  }

  std::vector<HybridDensity> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    HybridDensity d(grid);
    double spike = 0.0;
    for (double lw : spike_logw[static_cast<size_t>(i)])
      spike += std::exp(lw - max_logw);
    d.set_spike_mass(spike);
    for (const SlabTerm& t : slab_terms[static_cast<size_t>(i)]) {
      const double wgt = std::exp(t.log_w - max_logw);
      const double std_dev = std::sqrt(t.var);
      const double reach = 9.5 * std_dev;
      const double dx = grid.spacing();
      const int k_lo = std::max(
          0, static_cast<int>(std::floor((t.mean - reach - grid.min_x()) / dx)));
      const int k_hi = std::min(
          grid.n_points - 1,
          static_cast<int>(std::ceil((t.mean + reach - grid.min_x()) / dx)));
      for (int kk = k_lo; kk <= k_hi; ++kk)
        d.slab()[static_cast<size_t>(kk)] +=
            wgt * gaussian_pdf(grid.node(kk), t.mean, std_dev);
    }
    d.normalize();
    out.push_back(std::move(d));
  }
  return out;
}

// Per-iteration diagnostic log as CSV.
inline void write_bp_trace_csv(const BpDiagnostics& diag, std::ostream& os) {
  os << "iteration,max_message_delta\n";
  for (const auto& [it, delta] : diag.trace) {
    char line[64];
    std::snprintf(line, sizeof(line), "%d,%.17g\n", it, delta);
    os << line;
  }
}

}  // namespace ssd
