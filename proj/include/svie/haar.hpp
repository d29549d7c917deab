#pragma once
// Unnormalized Haar wavelet family on [0,1): index arithmetic, pointwise
// evaluation, the running integral p_{i,1}(y) = int_0^y h_i(u) du, and the
// dyadic midpoint collocation grids the solver collocates on.
//
// Conventions: h_1 is identically 1 on [0,1). For i >= 2 the index splits as
// i = m + n + 1 with m = 2^level and translation n in [0, m); h_i is +1 on
// [alpha, beta), -1 on [beta, gamma), 0 elsewhere, where alpha = n/m,
// beta = (n+1/2)/m, gamma = (n+1)/m. All members of the family are 0 at
// y = 1 (right-open convention).
#include <bit>
#include <stdexcept>
#include <string>
#include <vector>

namespace svie {

// Level/translation decomposition of a Haar index, with support breakpoints.
// Index 1 is the distinguished constant function; level/translation are set
// to -1 for it and the breakpoints span the whole interval.
struct HaarIndex {
  int index = 1;
  int level = -1;
  int translation = -1;
  double alpha = 0.0;   // support start, n/m
  double beta = 0.5;    // sign change, (n + 1/2)/m
  double gamma = 1.0;   // support end, (n + 1)/m
  bool constant() const { return index == 1; }
  // Scale factor m = 2^level; the constant function counts as scale 1, which
  // makes int_0^1 h_i^2 = 1/scale() hold for every index.
  int scale() const { return constant() ? 1 : (1 << level); }
};

// Splits i into (level, translation). The inverse of enumerating (l, n)
// pairs in lexicographic order starting at i = 2: level = floor(log2(i-1)).
inline HaarIndex decompose_index(int i) {
  if (i < 1) {
    throw std::domain_error("decompose_index: index must be >= 1, got " +
                            std::to_string(i));
  }
  if (i == 1) return HaarIndex{};
  const unsigned m = std::bit_floor(static_cast<unsigned>(i) - 1u);
  HaarIndex h;
  h.index = i;
  h.level = std::countr_zero(m);
  h.translation = i - 1 - static_cast<int>(m);
  // m is a power of two, so these divisions are exact dyadics.
  const double dm = static_cast<double>(m);
  h.alpha = h.translation / dm;
  h.beta = (h.translation + 0.5) / dm;
  h.gamma = (h.translation + 1.0) / dm;
  return h;
}

namespace detail {
inline void check_unit_interval(double y, const char* where) {
  if (!(y >= 0.0 && y <= 1.0)) {
    throw std::domain_error(std::string(where) + ": y must lie in [0,1], got " +
                            std::to_string(y));
  }
}
}  // namespace detail

// Pointwise wavelet value, in {-1, 0, +1}.
inline double haar_eval(const HaarIndex& h, double y) {
  detail::check_unit_interval(y, "haar_eval");
  if (h.constant()) return y < 1.0 ? 1.0 : 0.0;
  if (y < h.alpha) return 0.0;
  if (y < h.beta) return 1.0;
  if (y < h.gamma) return -1.0;
  return 0.0;
}

inline double haar_eval(int i, double y) {
  return haar_eval(decompose_index(i), y);
}

// Running integral p_{i,1}(y). For i >= 2 this is the tent y - alpha on
// [alpha, beta), gamma - y on [beta, gamma), and 0 elsewhere (the two halves
// of the wavelet cancel exactly once y passes gamma). For i = 1 it is y.
inline double p_int(const HaarIndex& h, double y) {
  detail::check_unit_interval(y, "p_int");
  if (h.constant()) return y;
  if (y < h.alpha) return 0.0;
  if (y < h.beta) return y - h.alpha;
  if (y < h.gamma) return h.gamma - y;
  return 0.0;
}

inline double p_int(int i, double y) { return p_int(decompose_index(i), y); }

// Midpoint collocation grid at resolution level L: the 2M points
// (k + 1/2)/(2M), k = 0..2M-1, with M = 2^L. Stored 0-based; the k-th point
// is strictly inside the k-th of the 2M dyadic cells, so no point ever
// coincides with a Haar breakpoint.
struct CollocationGrid {
  int level = 0;
  int half = 1;                 // M = 2^level
  std::vector<double> points;   // size 2M
  int size() const { return 2 * half; }
};

inline CollocationGrid collocation_grid(int level) {
  if (level < 0 || level > 24) {
    throw std::domain_error("collocation_grid: level must be in [0, 24], got " +
                            std::to_string(level));
  }
  CollocationGrid g;
  g.level = level;
  g.half = 1 << level;
  const int n = 2 * g.half;
  g.points.resize(n);
  const double denom = static_cast<double>(n);  // power of two: exact points
  for (int k = 0; k < n; ++k) g.points[k] = (k + 0.5) / denom;
  return g;
}

}  // namespace svie
