#pragma once

#include <stdexcept>

namespace ssd {

inline bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

// Uniform grid for sampled one-dimensional densities.
//
// Node convention (offset convention, fixed project-wide): n_points is a
// power of two and node k sits at
//     x_k = (k - n_points/2) * spacing,   spacing = 2*half_width / n_points,
// so x = 0 is always a node (index n_points/2) and the covered range is
// [-half_width, half_width - spacing]. A power-of-two node count keeps FFT
// lengths cheap; the price is one missing node at +half_width.
struct GridSpec {
  double half_width = 0.0;
  int n_points = 0;

  static GridSpec make(double half_width, int n_points) {
    if (!(half_width > 0.0))
      throw std::invalid_argument("GridSpec: half_width must be positive");
    if (n_points < 64)
      throw std::invalid_argument("GridSpec: n_points must be >= 64");
    if (!is_power_of_two(n_points))
      throw std::invalid_argument("GridSpec: n_points must be a power of two");
    return GridSpec{half_width, n_points};
  }

  double spacing() const { return 2.0 * half_width / n_points; }
  int zero_index() const { return n_points / 2; }
  double node(int k) const { return (k - n_points / 2) * spacing(); }
  double min_x() const { return node(0); }
  double max_x() const { return node(n_points - 1); }
  bool contains(double x) const { return x >= min_x() && x <= max_x(); }

  bool operator==(const GridSpec&) const = default;
};

// Default grid rule: half-width 8*sigma_x covers every prior and posterior
// slab used here with better than 6-sigma margin.
inline GridSpec default_grid(double sigma_x, int n_points = 1024) {
  return GridSpec::make(8.0 * sigma_x, n_points);
}

}  // namespace ssd
