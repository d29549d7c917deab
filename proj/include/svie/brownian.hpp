#pragma once
// Discrete Brownian paths on a uniform grid over [0,1] and the Ito integrals
// q_{i,1}(y) = int_0^y h_i dB taken against them.
//
// Paths are pure functions of (seed, path_index): each index gets its own
// counter-derived generator substream, so ensembles are reproducible
// bit-for-bit no matter how path solves are scheduled. Evaluation is
// grid-only by design -- interpolating between nodes would break the exact
// correspondence between the reduced form of q_{i,1} and the left-point
// Riemann-Stieltjes sum over the same increments.
#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "svie/errors.hpp"
#include "svie/format.hpp"
#include "svie/haar.hpp"

namespace svie {

namespace detail {

// SplitMix64 finalizer; doubles as the substream key derivation.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct SplitMix64 {
  std::uint64_t state = 0;
  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    return mix64(state);
  }
  // Uniform in (0, 1]; never 0, so the Box-Muller log stays finite.
  double next_open_unit() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }
};

// One path's Gaussian stream: Box-Muller pairs drawn from its substream.
struct GaussianStream {
  SplitMix64 rng;
  bool have_spare = false;
  double spare = 0.0;

  explicit GaussianStream(std::uint64_t key) : rng{key} {}
  double next() {
    if (have_spare) {
      have_spare = false;
      return spare;
    }
    const double u1 = rng.next_open_unit();
    const double u2 = rng.next_open_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare = r * std::sin(a);
    have_spare = true;
    return r * std::cos(a);
  }
};

inline std::uint64_t path_stream_key(std::uint64_t seed, int path_index) {
  return mix64(seed +
               0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(path_index) + 1));
}

}  // namespace detail

// Ensemble description: R paths from one master seed, each discretized on a
// grid of G uniform steps. grid_count = 0 lets the consumer derive G from
// the resolution level it is working at.
struct PathEnsembleConfig {
  int paths = 1;
  std::uint64_t seed = 0;
  int grid_count = 0;
};

// B(0) = 0 and G i.i.d. N(0, 1/G) increments; values[k] = B(k/G).
struct BrownianPath {
  double step = 0.0;
  std::vector<double> values;
  PathSeed origin;

  int grid_count() const { return static_cast<int>(values.size()) - 1; }
};

inline BrownianPath simulate_path(const PathEnsembleConfig& config,
                                  int path_index) {
  if (config.paths < 1) {
    throw std::domain_error("simulate_path: ensemble needs paths >= 1");
  }
  if (path_index < 0 || path_index >= config.paths) {
    throw std::domain_error("simulate_path: path index " +
                            std::to_string(path_index) + " outside [0, " +
                            std::to_string(config.paths) + ")");
  }
  const int g = config.grid_count;
  if (g < 4 || g % 4 != 0) {
    throw std::domain_error("simulate_path: grid_count must be a positive "
                            "multiple of 4, got " + std::to_string(g));
  }
  BrownianPath path;
  path.step = 1.0 / g;
  path.origin = PathSeed{config.seed, path_index};
  path.values.resize(g + 1);
  path.values[0] = 0.0;
  detail::GaussianStream normals(detail::path_stream_key(config.seed, path_index));
  const double root_step = std::sqrt(path.step);
  for (int k = 0; k < g; ++k) {
    path.values[k + 1] = path.values[k] + root_step * normals.next();
  }
  return path;
}

// All-zero path on the same node layout as simulated paths. Every stochastic
// integral against it vanishes, which turns a stochastic solve into the
// corresponding deterministic one.
inline BrownianPath constant_path(int grid_count) {
  if (grid_count < 4 || grid_count % 4 != 0) {
    throw std::domain_error("constant_path: grid_count must be a positive "
                            "multiple of 4, got " + std::to_string(grid_count));
  }
  BrownianPath path;
  path.step = 1.0 / grid_count;
  path.origin = PathSeed{0, -1};
  path.values.assign(grid_count + 1, 0.0);
  return path;
}

namespace detail {
// Maps t to its grid node, refusing anything farther than 1e-12 off-grid.
inline int node_index(const BrownianPath& path, double t, const char* where) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::domain_error(std::string(where) + ": t must lie in [0,1], got " +
                            std::to_string(t));
  }
  const int g = path.grid_count();
  const long long k = std::llround(t * g);
  if (k < 0 || k > g || std::abs(t - k * path.step) > 1e-12) {
    throw off_grid_error(std::string(where) + ": t = " + std::to_string(t) +
                         " is not a node of the " + std::to_string(g) +
                         "-step path grid");
  }
  return static_cast<int>(k);
}
}  // namespace detail

inline double path_value(const BrownianPath& path, double t) {
  return path.values[detail::node_index(path, t, "path_value")];
}

// q_{i,1}(y) against a discrete path. h_i is constant on every grid cell
// (its breakpoints must be nodes), so the stochastic integral is *exactly*
// the finite sum  sum_k h_i(k delta) (B_{k+1} - B_k)  over cells below y.
// It is evaluated in ascending k order as that sum; the reduced branch form
//   B(y)-B(alpha) on [alpha,beta), 2B(beta)-B(alpha)-B(y) on [beta,gamma),
//   2B(beta)-B(alpha)-B(gamma) past gamma, 0 before alpha  (B(y) for i = 1)
// describes the same real number but groups the increments differently, so
// summing them in cell order is what keeps the result bit-comparable to a
// left-point Riemann-Stieltjes evaluation of the same path.
inline double q_int(const HaarIndex& h, double y, const BrownianPath& path) {
  const int node_y = detail::node_index(path, y, "q_int");
  const int g = path.grid_count();
  int first = 0;       // first cell of the support
  int flip = node_y;   // first cell of the negative half
  int last = node_y;   // one past the last support cell
  if (!h.constant()) {
    const int m = h.scale();
    if (g % (2 * m) != 0) {
      throw off_grid_error("q_int: path grid of " + std::to_string(g) +
                           " steps does not resolve the breakpoints of index " +
                           std::to_string(h.index));
    }
    const int cells_per_half = g / (2 * m);
    first = 2 * h.translation * cells_per_half;
    flip = first + cells_per_half;
    last = first + 2 * cells_per_half;
  }
  const int stop = std::min(node_y, last);
  double sum = 0.0;
  for (int k = first; k < stop; ++k) {
    const double incr = path.values[k + 1] - path.values[k];
    if (k < flip) {
      sum += incr;
    } else {
      sum -= incr;
    }
  }
  return sum;
}

inline double q_int(int i, double y, const BrownianPath& path) {
  return q_int(decompose_index(i), y, path);
}

// CSV fixture format: header "k,t,B", one row per node, shortest round-trip
// decimals so dump -> load reproduces the path bit-for-bit.
inline void write_path_csv(const BrownianPath& path, std::ostream& out) {
  out << "k,t,B\n";
  const int g = path.grid_count();
  for (int k = 0; k <= g; ++k) {
    out << k << ',' << detail::format_double(k * path.step) << ','
        << detail::format_double(path.values[k]) << '\n';
  }
}

inline BrownianPath read_path_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "k,t,B") {
    throw std::runtime_error("read_path_csv: missing 'k,t,B' header");
  }
  std::vector<double> times;
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    std::getline(row, field, ',');
    const long long k = std::stoll(field);
    if (k != static_cast<long long>(times.size())) {
      throw std::runtime_error("read_path_csv: node indices must run 0,1,2,...");
    }
    std::getline(row, field, ',');
    times.push_back(std::stod(field));
    if (!std::getline(row, field, ',')) {
      throw std::runtime_error("read_path_csv: row with fewer than 3 fields");
    }
    values.push_back(std::stod(field));
  }
  if (times.size() < 2) {
    throw std::runtime_error("read_path_csv: path needs at least two nodes");
  }
  BrownianPath path;
  path.step = times[1];
  path.values = std::move(values);
  if (path.values[0] != 0.0) {
    throw std::runtime_error("read_path_csv: path must start at B(0) = 0");
  }
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (std::abs(times[k] - static_cast<double>(k) * path.step) > 1e-12) {
      throw std::runtime_error("read_path_csv: non-uniform time column");
    }
  }
  if (std::abs(times.back() - 1.0) > 1e-12) {
    throw std::runtime_error("read_path_csv: path must end at t = 1");
  }
  return path;
}

}  // namespace svie
