#pragma once
// Row-major dense storage and an in-place blocked LU factorization with
// partial pivoting. Sized for the per-path collocation systems (up to a few
// thousand unknowns), where the factorization dominates the runtime.
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace svie {

// Minimal row-major matrix of doubles; doubles as sample/coefficient/solution
// grids and as the dense system storage.
struct Grid {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Grid() = default;
  Grid(int r, int c, double fill = 0.0)
      : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, fill) {
    if (r < 0 || c < 0) throw std::domain_error("Grid: negative extent");
  }
  double& operator()(int r, int c) {
    return v[static_cast<std::size_t>(r) * cols + c];
  }
  double operator()(int r, int c) const {
    return v[static_cast<std::size_t>(r) * cols + c];
  }
  double* row(int r) { return v.data() + static_cast<std::size_t>(r) * cols; }
  const double* row(int r) const {
    return v.data() + static_cast<std::size_t>(r) * cols;
  }
  std::size_t size() const { return v.size(); }
};

inline double inf_norm(const Grid& a) {
  double best = 0.0;
  for (int r = 0; r < a.rows; ++r) {
    double s = 0.0;
    const double* ar = a.row(r);
    for (int c = 0; c < a.cols; ++c) s += std::abs(ar[c]);
    best = std::max(best, s);
  }
  return best;
}

// L (unit diagonal) and U share the factored storage. pivots[k] is the row
// swapped into position k at elimination step k.
struct LuFactors {
  Grid lu;
  std::vector<int> pivots;
  double min_pivot = 0.0;   // smallest |U_kk| accepted
  bool singular = false;
  int stop_col = -1;        // column where elimination gave up
};

// Factors a (by value; the copy becomes the LU storage). Columns whose best
// available pivot falls below rel_pivot_floor * ||A||_inf mark the matrix
// singular; the caller decides how to report that. Blocked right-looking
// elimination: unblocked panel, triangular update of the panel's U rows,
// then a column-tiled Schur complement update so the trailing matrix is
// streamed once per block step instead of once per column.
inline LuFactors lu_factor(Grid a, double rel_pivot_floor = 1e-12) {
  if (a.rows != a.cols) throw std::domain_error("lu_factor: matrix not square");
  const int n = a.rows;
  LuFactors f;
  f.pivots.assign(n, 0);
  f.min_pivot = std::numeric_limits<double>::infinity();
  const double floor_abs = rel_pivot_floor * inf_norm(a);

  constexpr int kPanel = 64;
  constexpr int kColTile = 256;

  for (int k0 = 0; k0 < n; k0 += kPanel) {
    const int kb = std::min(kPanel, n - k0);
    const int c0 = k0 + kb;

    // Panel factorization over columns [k0, c0).
    for (int j = k0; j < c0; ++j) {
      int piv = j;
      double best = std::abs(a(j, j));
      for (int r = j + 1; r < n; ++r) {
        const double mag = std::abs(a(r, j));
        if (mag > best) {
          best = mag;
          piv = r;
        }
      }
      if (!(best >= floor_abs) || !std::isfinite(best)) {
        f.singular = true;
        f.stop_col = j;
        f.min_pivot = std::min(f.min_pivot, best);
        f.lu = std::move(a);
        return f;
      }
      f.pivots[j] = piv;
      if (piv != j) std::swap_ranges(a.row(j), a.row(j) + n, a.row(piv));
      const double d = a(j, j);
      f.min_pivot = std::min(f.min_pivot, std::abs(d));
      const double inv = 1.0 / d;
      const double* aj = a.row(j);
      for (int r = j + 1; r < n; ++r) {
        double* ar = a.row(r);
        const double m = ar[j] * inv;
        ar[j] = m;
        if (m != 0.0) {
          for (int c = j + 1; c < c0; ++c) ar[c] -= m * aj[c];
        }
      }
    }
    if (c0 >= n) break;

    // Finish the panel's U rows: A[r, c0:) -= sum_{t<r} L[r,t] * A[t, c0:).
    for (int t = k0; t < c0; ++t) {
      const double* at = a.row(t);
      for (int r = t + 1; r < c0; ++r) {
        const double m = a(r, t);
        if (m != 0.0) {
          double* ar = a.row(r);
          for (int c = c0; c < n; ++c) ar[c] -= m * at[c];
        }
      }
    }

    // Schur update A22 -= L21 * U12, tiled over column ranges so each U tile
    // stays cache-resident while the A22 rows stream through.
    for (int cb = c0; cb < n; cb += kColTile) {
      const int ce = std::min(cb + kColTile, n);
      for (int r = c0; r < n; ++r) {
        double* ar = a.row(r);
        for (int t = k0; t < c0; ++t) {
          const double m = ar[t];
          if (m != 0.0) {
            const double* ut = a.row(t);
            for (int c = cb; c < ce; ++c) ar[c] -= m * ut[c];
          }
        }
      }
    }
  }
  f.lu = std::move(a);
  return f;
}

// Solves LU x = P b with forward/back substitution (row-oriented, so the
// inner loops run over contiguous storage).
inline std::vector<double> lu_solve(const LuFactors& f, std::vector<double> b) {
  if (f.singular) throw std::logic_error("lu_solve: factors marked singular");
  const int n = f.lu.rows;
  if (static_cast<int>(b.size()) != n) {
    throw std::domain_error("lu_solve: rhs size mismatch");
  }
  for (int k = 0; k < n; ++k) {
    if (f.pivots[k] != k) std::swap(b[k], b[f.pivots[k]]);
  }
  for (int k = 1; k < n; ++k) {
    const double* row = f.lu.row(k);
    double s = 0.0;
    for (int c = 0; c < k; ++c) s += row[c] * b[c];
    b[k] -= s;
  }
  for (int k = n - 1; k >= 0; --k) {
    const double* row = f.lu.row(k);
    double s = 0.0;
    for (int c = k + 1; c < n; ++c) s += row[c] * b[c];
    b[k] = (b[k] - s) / row[k];
  }
  return b;
}

// ||A x - rhs||_inf, evaluated against the original (unfactored) matrix.
inline double residual_inf(const Grid& a, const std::vector<double>& x,
                           const std::vector<double>& rhs) {
  const int n = a.rows;
  double worst = 0.0;
  for (int r = 0; r < n; ++r) {
    const double* ar = a.row(r);
    double s = 0.0;
    for (int c = 0; c < a.cols; ++c) s += ar[c] * x[c];
    worst = std::max(worst, std::abs(s - rhs[r]));
  }
  return worst;
}

}  // namespace svie
