#pragma once
// Two-dimensional Haar coefficient machinery on dyadic collocation grids:
// the O(1)-per-coefficient block-window transform (midpoint samples in,
// tensor coefficients out, no linear solve), and piecewise-constant
// reconstruction of the expansion.
#include <bit>
#include <stdexcept>
#include <string>
#include <vector>

#include "svie/haar.hpp"
#include "svie/linalg.hpp"

namespace svie {

// Grid-index windows of wavelet i against a row of `size` = 2M collocation
// points: the wavelet is +1 on cells [first, split], -1 on (split, last]
// (1-based, inclusive). rho = size / tau cells make up the support.
struct BlockIndices {
  int tau = 1;     // scale m of the wavelet
  int sigma = 1;   // translation + 1
  int rho = 0;     // support width in grid cells
  int first = 1;   // start of the positive half-window
  int split = 1;   // end of the positive half-window
  int last = 1;    // end of the negative half-window
};

inline BlockIndices block_indices(int i, int size) {
  if (size < 2 || (size & (size - 1)) != 0) {
    throw std::domain_error("block_indices: grid size must be a power of two "
                            ">= 2, got " + std::to_string(size));
  }
  if (i < 2 || i > size) {
    throw std::domain_error("block_indices: index " + std::to_string(i) +
                            " outside [2, " + std::to_string(size) + "]");
  }
  BlockIndices w;
  w.tau = static_cast<int>(std::bit_floor(static_cast<unsigned>(i) - 1u));
  w.sigma = i - w.tau;
  w.rho = size / w.tau;
  w.first = w.rho * (w.sigma - 1) + 1;
  w.split = w.first + w.rho / 2 - 1;
  w.last = w.rho * w.sigma;
  return w;
}

// Function samples G(x_p, y_q) on a pair of collocation grids.
// values(p, q) is the sample at (x.points[p], y.points[q]), 0-based.
struct SampleGrid {
  CollocationGrid x;
  CollocationGrid y;
  Grid values;
};

template <class F2>
SampleGrid make_samples(const CollocationGrid& gx, const CollocationGrid& gy,
                        const F2& f) {
  SampleGrid s{gx, gy, Grid(gx.size(), gy.size())};
  for (int p = 0; p < gx.size(); ++p) {
    for (int q = 0; q < gy.size(); ++q) {
      s.values(p, q) = f(gx.points[p], gy.points[q]);
    }
  }
  return s;
}

// Tensor Haar coefficients b_{i,j}, i = 1..2M, j = 1..2N, stored 0-based.
struct CoeffGrid {
  int half_x = 1;  // M
  int half_y = 1;  // N
  Grid b;
};

namespace detail {

inline double window_sum(const Grid& s, int p_lo, int p_hi, int q_lo, int q_hi) {
  // 1-based inclusive windows, matching the block index convention.
  double total = 0.0;
  for (int p = p_lo - 1; p < p_hi; ++p) {
    const double* row = s.row(p);
    double line = 0.0;
    for (int q = q_lo - 1; q < q_hi; ++q) line += row[q];
    total += line;
  }
  return total;
}

// One coefficient of the sample expansion. Four cases: the mean, a
// differenced window against a full axis (either way round), and the
// four-corner differenced window. Shared by the stored-grid transform and
// the direct pointwise reconstruction so both routes use one arithmetic.
inline double coeff_entry(const SampleGrid& s, int i, int j) {
  const int p_n = s.x.size();
  const int q_n = s.y.size();
  const bool di = i >= 2;  // differenced along x?
  const bool dj = j >= 2;
  if (!di && !dj) {
    return window_sum(s.values, 1, p_n, 1, q_n) /
           (static_cast<double>(p_n) * q_n);
  }
  if (di && !dj) {
    const BlockIndices w = block_indices(i, p_n);
    const double pos = window_sum(s.values, w.first, w.split, 1, q_n);
    const double neg = window_sum(s.values, w.split + 1, w.last, 1, q_n);
    return (pos - neg) / (static_cast<double>(w.rho) * q_n);
  }
  if (!di && dj) {
    const BlockIndices v = block_indices(j, q_n);
    const double pos = window_sum(s.values, 1, p_n, v.first, v.split);
    const double neg = window_sum(s.values, 1, p_n, v.split + 1, v.last);
    return (pos - neg) / (static_cast<double>(p_n) * v.rho);
  }
  const BlockIndices w = block_indices(i, p_n);
  const BlockIndices v = block_indices(j, q_n);
  const double pp = window_sum(s.values, w.first, w.split, v.first, v.split);
  const double pn = window_sum(s.values, w.first, w.split, v.split + 1, v.last);
  const double np = window_sum(s.values, w.split + 1, w.last, v.first, v.split);
  const double nn = window_sum(s.values, w.split + 1, w.last, v.split + 1, v.last);
  return ((pp - pn) - (np - nn)) / (static_cast<double>(w.rho) * v.rho);
}

inline void check_sample_shape(const SampleGrid& s, const char* where) {
  if (s.values.rows != s.x.size() || s.values.cols != s.y.size()) {
    throw std::domain_error(std::string(where) +
                            ": sample grid shape does not match its axes");
  }
}

}  // namespace detail

// Full coefficient grid of a sampled function. Direct window evaluation:
// every coefficient is a scaled difference of rectangular partial sums, so
// the cost is O(M N log^2) and no linear system is involved.
inline CoeffGrid coeffs_from_samples(const SampleGrid& s) {
  detail::check_sample_shape(s, "coeffs_from_samples");
  CoeffGrid c{s.x.half, s.y.half, Grid(s.x.size(), s.y.size())};
  for (int i = 1; i <= s.x.size(); ++i) {
    for (int j = 1; j <= s.y.size(); ++j) {
      c.b(i - 1, j - 1) = detail::coeff_entry(s, i, j);
    }
  }
  return c;
}

// Coefficients of a kernel-weighted surface K(x, y, s_p, t_q) * g(s_p, t_q)
// for a fixed evaluation point: the same transform applied to the product
// samples. The alias keeps the call sites honest about what is happening.
inline CoeffGrid kernel_coeffs(const SampleGrid& weighted_samples) {
  return coeffs_from_samples(weighted_samples);
}

namespace detail {
inline void check_unit_point(double x, double y, const char* where) {
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
    throw std::domain_error(std::string(where) +
                            ": evaluation point outside the unit square");
  }
}
}  // namespace detail

// Evaluates sum_{i,j} b_{i,j} h_i(x) h_j(y). Piecewise constant on the dyadic
// cells; identically 0 on the lines x = 1 and y = 1 (right-open convention).
inline double reconstruct(const CoeffGrid& c, double x, double y) {
  detail::check_unit_point(x, y, "reconstruct");
  const int p_n = 2 * c.half_x;
  const int q_n = 2 * c.half_y;
  if (c.b.rows != p_n || c.b.cols != q_n) {
    throw std::domain_error("reconstruct: coefficient grid shape mismatch");
  }
  std::vector<double> hx(p_n), hy(q_n);
  for (int i = 0; i < p_n; ++i) hx[i] = haar_eval(i + 1, x);
  for (int j = 0; j < q_n; ++j) hy[j] = haar_eval(j + 1, y);
  double total = 0.0;
  for (int i = 0; i < p_n; ++i) {
    if (hx[i] == 0.0) continue;
    const double* row = c.b.row(i);
    for (int j = 0; j < q_n; ++j) {
      if (hy[j] == 0.0) continue;
      total += row[j] * hx[i] * hy[j];
    }
  }
  return total;
}

// Single-point reconstruction straight from samples: expands the coefficient
// of every wavelet pair on the fly (same coefficient arithmetic as
// coeffs_from_samples) without materializing the coefficient grid.
inline double reconstruct_from_samples(const SampleGrid& s, double x, double y) {
  detail::check_sample_shape(s, "reconstruct_from_samples");
  detail::check_unit_point(x, y, "reconstruct_from_samples");
  double total = 0.0;
  for (int i = 1; i <= s.x.size(); ++i) {
    const double hx = haar_eval(i, x);
    if (hx == 0.0) continue;
    for (int j = 1; j <= s.y.size(); ++j) {
      const double hy = haar_eval(j, y);
      if (hy == 0.0) continue;
      total += detail::coeff_entry(s, i, j) * hx * hy;
    }
  }
  return total;
}

}  // namespace svie
