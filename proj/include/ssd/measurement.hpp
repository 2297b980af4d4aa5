#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "ssd/rng.hpp"
#include "ssd/signal_model.hpp"

namespace ssd {

// 0/1 measurement operator with fixed column weight L, stored as sorted row
// index lists per column plus a derived row adjacency so both message-passing
// directions get O(1) neighbor enumeration. Immutable after construction.
class SparseBinaryMatrix {
 public:
  SparseBinaryMatrix(int n_rows, int n_cols, int column_weight,
                     std::vector<std::vector<int>> col_rows,
                     std::uint64_t seed)
      : n_rows_(n_rows),
        n_cols_(n_cols),
        column_weight_(column_weight),
        col_rows_(std::move(col_rows)),
        seed_(seed) {
    row_cols_.assign(static_cast<size_t>(n_rows_), {});
    for (int i = 0; i < n_cols_; ++i) {
      auto& rows = col_rows_[static_cast<size_t>(i)];
      std::sort(rows.begin(), rows.end());
      if (static_cast<int>(rows.size()) != column_weight_)
        throw std::invalid_argument("SparseBinaryMatrix: column weight violated");
      for (int j : rows) {
        if (j < 0 || j >= n_rows_)
          throw std::invalid_argument("SparseBinaryMatrix: row index out of range");
        row_cols_[static_cast<size_t>(j)].push_back(i);
      }
    }
  }

  int rows() const { return n_rows_; }
  int cols() const { return n_cols_; }
  int column_weight() const { return column_weight_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<int>& column(int i) const { return col_rows_[static_cast<size_t>(i)]; }
  const std::vector<int>& row(int j) const { return row_cols_[static_cast<size_t>(j)]; }
  const std::vector<std::vector<int>>& columns() const { return col_rows_; }

  static constexpr int kInfiniteGirth = std::numeric_limits<int>::max();

  // Shortest cycle length of the bipartite graph (kInfiniteGirth if acyclic).
  // BFS from every variable node; cycles alternate sides so this hits every
  // cycle. Intended for diagnostics and tests, not hot paths.
  int girth() const {
    const int nv = n_cols_, nc = n_rows_;
    const int total = nv + nc;  // variables first, then checks
    int best = kInfiniteGirth;
    std::vector<int> dist(static_cast<size_t>(total));
    std::vector<int> parent(static_cast<size_t>(total));
    for (int start = 0; start < nv; ++start) {
      std::fill(dist.begin(), dist.end(), -1);
      std::fill(parent.begin(), parent.end(), -1);
      std::queue<int> q;
      dist[static_cast<size_t>(start)] = 0;
      q.push(start);
      while (!q.empty()) {
        const int u = q.front();
        q.pop();
        if (2 * dist[static_cast<size_t>(u)] >= best) continue;
        const bool is_var = u < nv;
        const auto& nbrs = is_var ? col_rows_[static_cast<size_t>(u)]
                                  : row_cols_[static_cast<size_t>(u - nv)];
        for (int w : nbrs) {
          const int v = is_var ? w + nv : w;
          if (v == parent[static_cast<size_t>(u)]) continue;
          if (dist[static_cast<size_t>(v)] < 0) {
            dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + 1;
            parent[static_cast<size_t>(v)] = u;
            q.push(v);
          } else {
            best = std::min(best, dist[static_cast<size_t>(u)] +
                                      dist[static_cast<size_t>(v)] + 1);
          }
        }
      }
    }
    return best;
  }

 private:
  int n_rows_;
  int n_cols_;
  int column_weight_;
  std::vector<std::vector<int>> col_rows_;
  std::vector<std::vector<int>> row_cols_;
  std::uint64_t seed_;
};

// Noisy linear measurement y = Phi x + w.
struct Measurement {
  std::vector<double> y;
  double sigma_w = 0.0;
};

namespace detail {
inline std::uint64_t row_pair_key(int a, int b, int m) {
  if (a > b) std::swap(a, b);
  return static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(m) +
         static_cast<std::uint64_t>(b);
}
}  // namespace detail

// True iff the bipartite graph has a cycle of length <= bound. Only 4-cycles
// (two columns sharing two rows) are meaningful for this operator family;
// larger bounds fall back to the exact girth.
inline bool girth_at_most(const SparseBinaryMatrix& m, int bound = 4) {
  if (bound < 4) return false;
  if (bound >= 6) return m.girth() <= bound;
  std::unordered_set<std::uint64_t> seen;
  for (int i = 0; i < m.cols(); ++i) {
    const auto& rows = m.column(i);
    for (size_t a = 0; a < rows.size(); ++a)
      for (size_t b = a + 1; b < rows.size(); ++b)
        if (!seen.insert(detail::row_pair_key(rows[a], rows[b], m.rows())).second)
          return true;
  }
  return false;
}

// Builds an M x N matrix with exactly L ones per column, no two columns
// sharing more than one row (girth >= 6). Columns are placed progressively
// with rejection; the whole placement restarts when a column cannot be
// placed, up to max_retries restarts.
inline SparseBinaryMatrix build_matrix(int n, int m, int l, Rng& rng,
                                       int max_retries = 50,
                                       std::ostream* warn = nullptr) {
  if (l < 1 || l > m)
    throw std::invalid_argument("build_matrix: need 1 <= L <= M");
  if (n < 1) throw std::invalid_argument("build_matrix: need N >= 1");
  if (m >= n && warn)
    *warn << "warning: M=" << m << " >= N=" << n
          << "; system is not underdetermined\n";

  const std::uint64_t seed_tag = rng();  // recorded for provenance
  Rng local(seed_tag);
  std::uniform_int_distribution<int> pick_row(0, m - 1);
  const int column_attempts = 200;

  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    std::vector<std::vector<int>> cols(static_cast<size_t>(n));
    std::unordered_set<std::uint64_t> pairs;
    bool failed = false;
    for (int i = 0; i < n && !failed; ++i) {
      bool placed = false;
      for (int t = 0; t < column_attempts && !placed; ++t) {
        std::vector<int> rows;
        rows.reserve(static_cast<size_t>(l));
        while (static_cast<int>(rows.size()) < l) {
          const int r = pick_row(local);
          if (std::find(rows.begin(), rows.end(), r) == rows.end())
            rows.push_back(r);
        }
        bool clash = false;
        for (size_t a = 0; a < rows.size() && !clash; ++a)
          for (size_t b = a + 1; b < rows.size() && !clash; ++b)
            if (pairs.count(detail::row_pair_key(rows[a], rows[b], m))) clash = true;
        if (clash) continue;
        for (size_t a = 0; a < rows.size(); ++a)
          for (size_t b = a + 1; b < rows.size(); ++b)
            pairs.insert(detail::row_pair_key(rows[a], rows[b], m));
        cols[static_cast<size_t>(i)] = std::move(rows);
        placed = true;
      }
      if (!placed) failed = true;
    }
    if (!failed)
      return SparseBinaryMatrix(m, n, l, std::move(cols), seed_tag);
  }
  throw std::runtime_error(
      "build_matrix: could not satisfy the 4-cycle-free constraint (column "
      "weight " + std::to_string(l) + " too dense for " + std::to_string(m) +
      " rows) after " + std::to_string(max_retries) + " retries");
}

// y = Phi x + w with w ~ Normal(0, sigma_w^2 I); sigma_w = 0 gives exact
// Phi x.
inline Measurement measure(const SparseBinaryMatrix& matrix,
                           const SignalInstance& signal, double sigma_w,
                           Rng& rng) {
  if (static_cast<int>(signal.values.size()) != matrix.cols())
    throw std::invalid_argument("measure: signal length does not match matrix columns");
  if (sigma_w < 0.0) throw std::invalid_argument("measure: negative sigma_w");
  Measurement out;
  out.sigma_w = sigma_w;
  out.y.assign(static_cast<size_t>(matrix.rows()), 0.0);
  for (int i = 0; i < matrix.cols(); ++i) {
    const double v = signal.values[static_cast<size_t>(i)];
    if (v == 0.0) continue;
    for (int j : matrix.column(i)) out.y[static_cast<size_t>(j)] += v;
  }
  if (sigma_w > 0.0) {
    std::normal_distribution<double> noise(0.0, sigma_w);
    for (auto& v : out.y) v += noise(rng);
  }
  return out;
}

// Text format: header "N M L seed", then one line per column listing row
// indices. Lets experiments replay a matrix bit-exactly.
inline void save_matrix(const SparseBinaryMatrix& m, std::ostream& os) {
  os << m.cols() << ' ' << m.rows() << ' ' << m.column_weight() << ' '
     << m.seed() << '\n';
  for (int i = 0; i < m.cols(); ++i) {
    const auto& rows = m.column(i);
    for (size_t k = 0; k < rows.size(); ++k)
      os << rows[k] << (k + 1 < rows.size() ? ' ' : '\n');
  }
}

inline SparseBinaryMatrix load_matrix(std::istream& is) {
  int n = 0, m = 0, l = 0;
  std::uint64_t seed = 0;
  if (!(is >> n >> m >> l >> seed))
    throw std::runtime_error("load_matrix: bad header (want 'N M L seed')");
  std::vector<std::vector<int>> cols(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    cols[static_cast<size_t>(i)].resize(static_cast<size_t>(l));
    for (int k = 0; k < l; ++k)
      if (!(is >> cols[static_cast<size_t>(i)][static_cast<size_t>(k)]))
        throw std::runtime_error("load_matrix: truncated column " + std::to_string(i));
  }
  return SparseBinaryMatrix(m, n, l, std::move(cols), seed);
}

}  // namespace ssd
