#pragma once
// Per-path collocation solver. For one Brownian path the unknown surface is
// pinned down at the 2M x 2N collocation points by a dense linear system:
// identity minus the deterministic kernel functional (weighted by the tent
// integrals p_{i,1}) minus the stochastic kernel functional (weighted by the
// path integrals q_{i,1}). Kernel samples depend only on the problem and the
// level, so they are precomputed once and shared across paths.
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "svie/brownian.hpp"
#include "svie/errors.hpp"
#include "svie/haar.hpp"
#include "svie/linalg.hpp"
#include "svie/tensor.hpp"

namespace svie {

// One equation instance: forcing term plus the two kernels. k2 may be the
// zero function, which makes the equation deterministic.
struct ProblemSpec {
  std::string name;
  std::function<double(double, double)> f;                          // f(x, y)
  std::function<double(double, double, double, double)> k1;  // K1(x, y, s, t)
  std::function<double(double, double, double, double)> k2;  // K2(x, y, s, t)
};

// Dense collocation system for one path. Rows and columns share the flat
// ordering flat = n * 2M + m (m fastest); rhs is f at the collocation points.
struct AssembledSystem {
  Grid a;
  std::vector<double> rhs;
  int half_x = 1;  // M
  int half_y = 1;  // N
  PathSeed origin;

  int flat(int m, int n) const { return n * 2 * half_x + m; }
};

// Solution values at the collocation points plus solve diagnostics.
struct PathSolution {
  Grid g;  // g(m, n) = solution at (x_m, y_n)
  int level = 0;
  double min_pivot = 0.0;
  double residual = 0.0;
  PathSeed origin;
};

namespace detail {

inline void check_finite_sample(double v, const char* what, double x, double y,
                                double s, double t) {
  if (!std::isfinite(v)) {
    throw assembly_error(std::string(what) + " sample is not finite at (x=" +
                         std::to_string(x) + ", y=" + std::to_string(y) +
                         ", s=" + std::to_string(s) + ", t=" +
                         std::to_string(t) + ")");
  }
}

}  // namespace detail

// Everything about a (problem, level) pair that does not depend on the path:
// grids, kernel samples in system layout, forcing values, and the
// deterministic weight matrix px(m, p) = sum_i p_{i,1}(x_m) * w_i(s_p).
struct PreparedProblem {
  ProblemSpec problem;
  int level = 0;
  CollocationGrid gx;  // x and s share this grid
  CollocationGrid gy;  // y and t share this grid
  Grid k1_samples;     // (row, col) in system layout
  Grid k2_samples;
  Grid px;  // px(m, p), 2M x 2M
  Grid py;  // py(n, q), 2N x 2N
  std::vector<double> rhs;

  int dim() const { return gx.size() * gy.size(); }
  // Smallest simulation grid on which every collocation point and wavelet
  // breakpoint of this level is a node. Halves are powers of two, so the
  // larger one is their least common multiple.
  int min_grid_count() const {
    return 4 * (gx.half > gy.half ? gx.half : gy.half);
  }
};

namespace detail {

// w_i weights against one axis: weight(i, p) = scale(i) * h_i(point_p) / len.
// Row m of the output is sum_i basis_value(i, m) * weight(i, p); for the
// deterministic part basis_value is p_{i,1}(x_m), for the stochastic part it
// is q_{i,1}(x_m) along the current path.
template <class BasisValue>
Grid weight_matrix(const CollocationGrid& grid, const BasisValue& value_of) {
  const int len = grid.size();
  Grid out(len, len);
  for (int m = 0; m < len; ++m) {
    std::vector<double> v(len);
    for (int i = 1; i <= len; ++i) v[i - 1] = value_of(i, grid.points[m]);
    for (int p = 0; p < len; ++p) {
      double acc = 0.0;
      for (int i = 1; i <= len; ++i) {
        const double h = haar_eval(i, grid.points[p]);
        if (h == 0.0) continue;
        const HaarIndex idx = decompose_index(i);
        acc += v[i - 1] * (static_cast<double>(idx.scale()) * h / len);
      }
      out(m, p) = acc;
    }
  }
  return out;
}

}  // namespace detail

inline PreparedProblem prepare(ProblemSpec problem, int level) {
  if (level < 0 || level > 5) {
    throw std::domain_error("prepare: level must lie in [0, 5] (dense system "
                            "size grows as 16^level), got " +
                            std::to_string(level));
  }
  if (!problem.f || !problem.k1 || !problem.k2) {
    throw std::domain_error("prepare: problem '" + problem.name +
                            "' is missing a callable");
  }
  PreparedProblem prep;
  prep.level = level;
  prep.gx = collocation_grid(level);
  prep.gy = collocation_grid(level);
  prep.problem = std::move(problem);

  const int pn = prep.gx.size();
  const int qn = prep.gy.size();
  const int dim = pn * qn;
  prep.k1_samples = Grid(dim, dim);
  prep.k2_samples = Grid(dim, dim);
  prep.rhs.resize(dim);
  for (int n = 0; n < qn; ++n) {
    const double y = prep.gy.points[n];
    for (int m = 0; m < pn; ++m) {
      const double x = prep.gx.points[m];
      const int row = n * pn + m;
      const double fv = prep.problem.f(x, y);
      if (!std::isfinite(fv)) {
        throw assembly_error("forcing sample is not finite at (x=" +
                             std::to_string(x) + ", y=" + std::to_string(y) +
                             ")");
      }
      prep.rhs[row] = fv;
      double* k1row = prep.k1_samples.row(row);
      double* k2row = prep.k2_samples.row(row);
      for (int q = 0; q < qn; ++q) {
        const double t = prep.gy.points[q];
        for (int p = 0; p < pn; ++p) {
          const double s = prep.gx.points[p];
          const double k1v = prep.problem.k1(x, y, s, t);
          detail::check_finite_sample(k1v, "deterministic kernel", x, y, s, t);
          const double k2v = prep.problem.k2(x, y, s, t);
          detail::check_finite_sample(k2v, "stochastic kernel", x, y, s, t);
          k1row[q * pn + p] = k1v;
          k2row[q * pn + p] = k2v;
        }
      }
    }
  }
  prep.px = detail::weight_matrix(
      prep.gx, [](int i, double x) { return p_int(i, x); });
  prep.py = detail::weight_matrix(
      prep.gy, [](int i, double y) { return p_int(i, y); });
  return prep;
}

// Builds the dense system for one path on top of a prepared problem. The path
// grid must contain every collocation point and wavelet breakpoint of the
// level (grid_count a multiple of prep.min_grid_count()).
inline AssembledSystem assemble_prepared(const PreparedProblem& prep,
                                         const BrownianPath& path) {
  const int pn = prep.gx.size();
  const int qn = prep.gy.size();
  const int dim = pn * qn;
  const Grid qx = detail::weight_matrix(
      prep.gx, [&](int i, double x) { return q_int(i, x, path); });
  const Grid qy = detail::weight_matrix(
      prep.gy, [&](int i, double y) { return q_int(i, y, path); });

  AssembledSystem sys;
  sys.half_x = prep.gx.half;
  sys.half_y = prep.gy.half;
  sys.origin = path.origin;
  sys.rhs = prep.rhs;
  sys.a = Grid(dim, dim);
  for (int n = 0; n < qn; ++n) {
    for (int m = 0; m < pn; ++m) {
      const int row = n * pn + m;
      double* arow = sys.a.row(row);
      const double* k1row = prep.k1_samples.row(row);
      const double* k2row = prep.k2_samples.row(row);
      const double* pxm = prep.px.row(m);
      const double* qxm = qx.row(m);
      for (int q = 0; q < qn; ++q) {
        const double pyv = prep.py(n, q);
        const double qyv = qy(n, q);
        for (int p = 0; p < pn; ++p) {
          const int col = q * pn + p;
          arow[col] = -(pxm[p] * pyv * k1row[col] + qxm[p] * qyv * k2row[col]);
        }
      }
      arow[row] += 1.0;
    }
  }
  return sys;
}

inline AssembledSystem assemble(const ProblemSpec& problem,
                                const BrownianPath& path, int level) {
  return assemble_prepared(prepare(problem, level), path);
}

// LU solve with the backward-error contract; failures carry the path origin.
inline PathSolution solve_dense(const AssembledSystem& system) {
  const int pn = 2 * system.half_x;
  const int qn = 2 * system.half_y;
  const int dim = pn * qn;
  if (system.a.rows != dim || system.a.cols != dim ||
      static_cast<int>(system.rhs.size()) != dim) {
    throw std::domain_error("solve_dense: system shape mismatch");
  }
  const LuFactors lu = lu_factor(system.a);
  if (lu.singular) {
    throw singular_system_error(
        "solve_dense: matrix is numerically singular (pivot " +
            std::to_string(lu.min_pivot) + " at column " +
            std::to_string(lu.stop_col) + ")",
        system.origin, lu.min_pivot);
  }
  const std::vector<double> flat = lu_solve(lu, system.rhs);

  double rhs_norm = 0.0;
  for (double v : system.rhs) rhs_norm = std::max(rhs_norm, std::fabs(v));
  const double res = residual_inf(system.a, flat, system.rhs);
  const double bound = 1e-8 * (1.0 + rhs_norm);
  if (!(res <= bound)) {
    throw residual_error("solve_dense: residual " + std::to_string(res) +
                             " exceeds the contract bound " +
                             std::to_string(bound),
                         system.origin, res);
  }

  PathSolution sol;
  sol.level = 0;
  for (int half = system.half_x; half > 1; half /= 2) ++sol.level;
  sol.min_pivot = lu.min_pivot;
  sol.residual = res;
  sol.origin = system.origin;
  sol.g = Grid(pn, qn);
  for (int n = 0; n < qn; ++n)
    for (int m = 0; m < pn; ++m) sol.g(m, n) = flat[n * pn + m];
  return sol;
}

inline PathSolution solve_once(const ProblemSpec& problem,
                               const BrownianPath& path, int level) {
  return solve_dense(assemble(problem, path, level));
}

inline PathSolution solve_prepared(const PreparedProblem& prep,
                                   const BrownianPath& path) {
  return solve_dense(assemble_prepared(prep, path));
}

// Off-grid evaluation: expand the solved collocation values in the tensor
// basis and read the expansion at (x, y). Piecewise constant per dyadic cell.
inline double evaluate_offgrid(const PathSolution& solution, double x, double y) {
  const CollocationGrid gx = collocation_grid(solution.level);
  if (solution.g.rows != gx.size() || solution.g.cols != gx.size()) {
    throw std::domain_error("evaluate_offgrid: solution grid does not match "
                            "its level");
  }
  SampleGrid samples{gx, gx, solution.g};
  return reconstruct_from_samples(samples, x, y);
}

}  // namespace svie
