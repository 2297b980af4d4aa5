#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssd/channel.hpp"
#include "ssd/detectors.hpp"

namespace ssd {

// Closed-form detection function value on the decoupled channel.
inline double detection_h(const DetectorKind& det, double sigma_w, double x0,
                          double q, double sigma_x, int l) {
  const ChannelPoint p{x0, sigma_w, l, SpikeSlabPrior{q, sigma_x, GaussianSlab{}}};
  return detect(posterior_params(p), det).h_value;
}

struct BoundarySolver {
  double x_max = 20.0;
  double tol = 1e-6;
  int prescan_nodes = 64;
  int fine_scan_nodes = 4096;
};

struct BoundaryPoint {
  double x0_star = 0.0;  // +inf when no magnitude in range succeeds
  bool flagged = false;  // monotonicity violated in the pre-scan
};

// Minimal |x0| at which the detection function turns positive at this noise
// level. A coarse pre-scan certifies a single sign change before bisection;
// multiple crossings fall back to the finest scan's smallest crossing and
// flag the point. h(0) > 0 cannot happen for q < 1/2 and is treated as a
// hard error.
inline BoundaryPoint boundary_point(const DetectorKind& det, double sigma_w,
                                    double q, double sigma_x, int l,
                                    const BoundarySolver& solver = {}) {
  if (!(sigma_w > 0.0))
    throw std::invalid_argument("boundary_point: sigma_w must be > 0");
  if (!(solver.x_max >= 0.0))
    throw std::invalid_argument("boundary_point: x_max must be >= 0");
  auto h = [&](double x0) { return detection_h(det, sigma_w, x0, q, sigma_x, l); };

  if (h(0.0) > 0.0)
    throw std::runtime_error(
        "boundary_point: detection function positive at x0=0 (q >= 1/2?)");

  auto scan = [&](int nodes, int& first_lo, int& crossings) {
    crossings = 0;
    first_lo = -1;
    double prev = h(0.0);
    for (int k = 1; k <= nodes; ++k) {
      const double x = solver.x_max * k / nodes;
      const double cur = h(x);
      if (prev <= 0.0 && cur > 0.0) {
        ++crossings;
        if (first_lo < 0) first_lo = k - 1;
      }
      prev = cur;
    }
  };

  int first_lo = -1, crossings = 0;
  scan(solver.prescan_nodes, first_lo, crossings);
  BoundaryPoint out;
  int nodes = solver.prescan_nodes;
  if (crossings == 0) {
    out.x0_star = std::numeric_limits<double>::infinity();
    return out;
  }
  if (crossings > 1) {
    out.flagged = true;
    scan(solver.fine_scan_nodes, first_lo, crossings);
    nodes = solver.fine_scan_nodes;
  }

  double lo = solver.x_max * first_lo / nodes;
  double hi = solver.x_max * (first_lo + 1) / nodes;
  while (hi - lo > solver.tol) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  out.x0_star = 0.5 * (lo + hi);
  return out;
}

// Boundary curve samples over a sigma_w grid, with the parameters that fix
// the curve. Canonical orientation: success = {|x0| > x0_star(sigma_w)}.
struct PTBoundary {
  DetectorKind detector;
  double q = 0.0;
  double sigma_x = 0.0;
  int l = 0;
  double solver_tol = 0.0;
  std::vector<double> sigma_w;
  std::vector<double> x0_star;
  std::vector<std::uint8_t> flagged;  // solver flag or monotonicity violation
};

inline PTBoundary boundary_curve(const DetectorKind& det,
                                 const std::vector<double>& sigma_w_grid,
                                 double q, double sigma_x, int l,
                                 const BoundarySolver& solver = {}) {
  for (size_t k = 1; k < sigma_w_grid.size(); ++k)
    if (!(sigma_w_grid[k] > sigma_w_grid[k - 1]))
      throw std::invalid_argument("boundary_curve: sigma_w grid must increase");
  PTBoundary out;
  out.detector = det;
  out.q = q;
  out.sigma_x = sigma_x;
  out.l = l;
  out.solver_tol = solver.tol;
  out.sigma_w = sigma_w_grid;
  out.x0_star.reserve(sigma_w_grid.size());
  out.flagged.assign(sigma_w_grid.size(), 0);
  for (size_t k = 0; k < sigma_w_grid.size(); ++k) {
    const BoundaryPoint bp = boundary_point(det, sigma_w_grid[k], q, sigma_x, l, solver);
    out.x0_star.push_back(bp.x0_star);
    if (bp.flagged) out.flagged[k] = 1;
    // Curve monotonicity diagnostic: x0_star should not decrease with noise.
    if (k > 0 && out.x0_star[k] < out.x0_star[k - 1] - 10.0 * solver.tol)
      out.flagged[k] = 1;
  }
  return out;
}

struct DominanceReport {
  bool dominates = false;     // a.x0_star <= b.x0_star at every node
  double max_gap = 0.0;       // max over nodes of b - a
  double mean_gap = 0.0;
  double min_gap = 0.0;
  // Least-squares slope of the gap over the upper half of the sigma_w grid;
  // positive means the advantage grows with the magnitude scale.
  double upper_half_gap_slope = 0.0;
  int nodes = 0;
};

// Pointwise comparison of two boundaries on identical grids and parameters.
// Detector a dominates b when its required magnitude never exceeds b's.
inline DominanceReport region_dominance(const PTBoundary& a, const PTBoundary& b) {
  if (a.sigma_w != b.sigma_w)
    throw std::invalid_argument("region_dominance: sigma_w grid mismatch");
  if (a.q != b.q || a.sigma_x != b.sigma_x || a.l != b.l)
    throw std::invalid_argument("region_dominance: parameter mismatch");
  DominanceReport rep;
  rep.nodes = static_cast<int>(a.sigma_w.size());
  rep.dominates = true;
  rep.min_gap = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  std::vector<double> gaps(a.sigma_w.size());
  for (size_t k = 0; k < a.sigma_w.size(); ++k) {
    const double gap = b.x0_star[k] - a.x0_star[k];
    gaps[k] = gap;
    if (gap < -a.solver_tol) rep.dominates = false;
    rep.max_gap = std::max(rep.max_gap, gap);
    rep.min_gap = std::min(rep.min_gap, gap);
    sum += gap;
  }
  rep.mean_gap = a.sigma_w.empty() ? 0.0 : sum / a.sigma_w.size();

  const size_t start = a.sigma_w.size() / 2;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int cnt = 0;
  for (size_t k = start; k < a.sigma_w.size(); ++k) {
    if (!std::isfinite(gaps[k])) continue;
    sx += a.sigma_w[k];
    sy += gaps[k];
    sxx += a.sigma_w[k] * a.sigma_w[k];
    sxy += a.sigma_w[k] * gaps[k];
    ++cnt;
  }
  if (cnt >= 2 && sxx * cnt - sx * sx > 0.0)
    rep.upper_half_gap_slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  return rep;
}

// Boundary CSV with the conventions that fix the curves carried as header
// comments.
inline void write_boundary_csv(const PTBoundary& bht, const PTBoundary& csbp,
                               std::ostream& os) {
  if (bht.sigma_w != csbp.sigma_w)
    throw std::invalid_argument("write_boundary_csv: grid mismatch");
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "# q=%.17g sigma_x=%.17g L=%d delta=%.17g solver_tol=%.17g\n",
                bht.q, bht.sigma_x, bht.l, csbp.detector.delta_convention,
                bht.solver_tol);
  os << buf;
  os << "sigma_w,x0_star_bht,x0_star_csbp\n";
  for (size_t k = 0; k < bht.sigma_w.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", bht.sigma_w[k],
                  bht.x0_star[k], csbp.x0_star[k]);
    os << buf;
  }
}

}  // namespace ssd
