#pragma once
// Monte Carlo layer: R independent path solves aggregated into per-point
// means, sample deviations, and normal confidence intervals. Accumulation is
// streamed in ascending path-index order over block-buffered results, so the
// summary is bit-identical for any thread count. The running-moment update
// also keeps the deviation exactly zero when every path produces the same
// surface (deterministic kernels), which plain sum-of-squares would not.
#include <atomic>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "svie/brownian.hpp"
#include "svie/errors.hpp"
#include "svie/linalg.hpp"
#include "svie/solver.hpp"

namespace svie {

// Inverse standard-normal CDF: rational initial guess refined by one Halley
// step against erfc, giving full double precision across (0, 1).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_quantile: p must lie in (0, 1), got " +
                            std::to_string(p));
  }
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement: e = Phi(x) - p.
  constexpr double root_two_pi = 2.5066282746310002;
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * root_two_pi * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

// Two-sided standard-normal critical value for a confidence level in (0, 1).
inline double confidence_z(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::domain_error("confidence must lie strictly in (0, 1), got " +
                            std::to_string(confidence));
  }
  return normal_quantile(0.5 + confidence / 2.0);
}

struct PathFailure {
  int path_index = -1;
  std::string reason;
};

// Ensemble statistics at the collocation points. All four surfaces share the
// solution-grid indexing g(m, n) = value at (x_m, y_n).
struct McSummary {
  Grid mean;
  Grid stddev;
  Grid ci_low;
  Grid ci_high;
  int level = 0;
  int r_requested = 0;
  int r_effective = 0;
  double confidence = 0.95;
  double z = 0.0;
  PathEnsembleConfig config;  // echo of the resolved path settings
  std::vector<PathFailure> failures;
};

namespace detail {

struct PathOutcome {
  std::optional<Grid> g;
  std::string reason;
};

inline void solve_block(const PreparedProblem& prep,
                        const PathEnsembleConfig& cfg, int lo, int hi,
                        int threads, std::vector<PathOutcome>& buffer) {
  const auto solve_into = [&](int r) {
    PathOutcome& slot = buffer[r - lo];
    try {
      slot.g = solve_prepared(prep, simulate_path(cfg, r)).g;
    } catch (const std::exception& e) {
      slot.g.reset();
      slot.reason = e.what();
    }
  };
  if (threads <= 1 || hi - lo <= 1) {
    for (int r = lo; r < hi; ++r) solve_into(r);
    return;
  }
  std::atomic<int> next{lo};
  const int workers = threads < hi - lo ? threads : hi - lo;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int r = next.fetch_add(1); r < hi; r = next.fetch_add(1))
        solve_into(r);
    });
  }
  for (std::thread& t : pool) t.join();
}

}  // namespace detail

// Solves `config.paths` independent paths and aggregates. Paths may be solved
// concurrently (`threads` > 1), but moments are always merged in ascending
// path-index order from the buffered block results, so the outcome is
// reproducible bit for bit regardless of the thread count.
inline McSummary run_ensemble(const ProblemSpec& problem, int level,
                              PathEnsembleConfig config, double confidence = 0.95,
                              int threads = 1) {
  if (config.paths < 1) {
    throw std::domain_error("run_ensemble: need at least one path, got " +
                            std::to_string(config.paths));
  }
  if (threads < 1) {
    throw std::domain_error("run_ensemble: threads must be >= 1, got " +
                            std::to_string(threads));
  }
  const double z = confidence_z(confidence);
  const PreparedProblem prep = prepare(problem, level);
  if (config.grid_count == 0) {
    config.grid_count = prep.min_grid_count();
  } else if (config.grid_count % prep.min_grid_count() != 0) {
    throw std::domain_error(
        "run_ensemble: grid_count " + std::to_string(config.grid_count) +
        " must be a multiple of " + std::to_string(prep.min_grid_count()) +
        " so every breakpoint of level " + std::to_string(level) +
        " is a node");
  }

  const int pn = prep.gx.size();
  const int qn = prep.gy.size();
  McSummary out;
  out.level = level;
  out.r_requested = config.paths;
  out.confidence = confidence;
  out.z = z;
  out.config = config;
  out.mean = Grid(pn, qn);
  out.stddev = Grid(pn, qn);
  out.ci_low = Grid(pn, qn);
  out.ci_high = Grid(pn, qn);

  Grid m2(pn, qn);
  int done = 0;
  const int block = threads > 1 ? 4 * threads : 64;
  std::vector<detail::PathOutcome> buffer;
  for (int lo = 0; lo < config.paths; lo += block) {
    const int hi = lo + block < config.paths ? lo + block : config.paths;
    buffer.assign(hi - lo, detail::PathOutcome{});
    detail::solve_block(prep, config, lo, hi, threads, buffer);
    for (int r = lo; r < hi; ++r) {
      detail::PathOutcome& slot = buffer[r - lo];
      if (!slot.g) {
        out.failures.push_back(PathFailure{r, std::move(slot.reason)});
        continue;
      }
      ++done;
      const Grid& g = *slot.g;
      for (std::size_t k = 0; k < g.size(); ++k) {
        const double x = g.v[k];
        const double delta = x - out.mean.v[k];
        out.mean.v[k] += delta / done;
        m2.v[k] += delta * (x - out.mean.v[k]);
      }
    }
  }
  out.r_effective = done;
  if (done == 0) {
    throw ensemble_error(
        "run_ensemble: all " + std::to_string(config.paths) +
        " paths failed; first failure (path 0): " + out.failures.front().reason);
  }

  const double root_r = std::sqrt(static_cast<double>(done));
  for (std::size_t k = 0; k < out.mean.size(); ++k) {
    const double sd = done > 1 ? std::sqrt(m2.v[k] / (done - 1)) : 0.0;
    out.stddev.v[k] = sd;
    const double half_width = z * sd / root_r;
    out.ci_low.v[k] = out.mean.v[k] - half_width;
    out.ci_high.v[k] = out.mean.v[k] + half_width;
  }
  return out;
}

// One row of the reporting table: the refinement level, grid sizes, the
// collocation pair, and the interval around the ensemble mean there.
struct TableRow {
  int j = 0;     // level
  int half = 1;  // M
  int size = 2;  // 2M
  double x = 0.0;
  double y = 0.0;
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

namespace detail {
inline int collocation_slot(const CollocationGrid& grid, double v,
                            const char* axis) {
  const int k = static_cast<int>(std::llround(v * grid.size() - 0.5));
  if (k < 0 || k >= grid.size() || std::fabs(v - grid.points[k]) > 1e-12) {
    throw std::domain_error(std::string("summary_table: ") + axis + " = " +
                            std::to_string(v) +
                            " is not a collocation point of level " +
                            std::to_string(grid.level));
  }
  return k;
}
}  // namespace detail

inline std::vector<TableRow> summary_table(
    const McSummary& summary,
    const std::vector<std::pair<double, double>>& points) {
  const CollocationGrid grid = collocation_grid(summary.level);
  std::vector<TableRow> rows;
  rows.reserve(points.size());
  for (const auto& [x, y] : points) {
    const int m = detail::collocation_slot(grid, x, "x");
    const int n = detail::collocation_slot(grid, y, "y");
    TableRow row;
    row.j = summary.level;
    row.half = grid.half;
    row.size = grid.size();
    row.x = x;
    row.y = y;
    row.mean = summary.mean(m, n);
    row.ci_low = summary.ci_low(m, n);
    row.ci_high = summary.ci_high(m, n);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace svie
