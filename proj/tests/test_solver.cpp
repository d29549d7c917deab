// Per-path collocation solver: assembly against a literal coefficient-by-
// coefficient reference, dense-solve oracle agreement, degenerate problems,
// manufactured-solution convergence, and the failure paths.
#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "support/reference_solve.hpp"
#include "svie/brownian.hpp"
#include "svie/oracles.hpp"
#include "svie/problems.hpp"
#include "svie/solver.hpp"
#include "svie/tensor.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using svie::AssembledSystem;
using svie::BrownianPath;
using svie::CollocationGrid;
using svie::Grid;
using svie::PathEnsembleConfig;
using svie::PathSolution;
using svie::ProblemSpec;

namespace {

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

// Literal reference for one assembled row: expand the kernel-weighted
// surface column by column. The coefficient of unknown (p, q) is obtained by
// masking the kernel samples down to that single grid point, running the
// block-window coefficient transform, and contracting against the tent /
// path-integral values at (x_m, y_n). Slow and direct on purpose.
Grid reference_matrix(const ProblemSpec& problem, const BrownianPath& path,
                      int level) {
  const CollocationGrid g = svie::collocation_grid(level);
  const int len = g.size();
  const int dim = len * len;
  Grid a(dim, dim);
  for (int n = 0; n < len; ++n) {
    const double y = g.points[n];
    for (int m = 0; m < len; ++m) {
      const double x = g.points[m];
      const int row = n * len + m;
      for (int q = 0; q < len; ++q) {
        for (int p = 0; p < len; ++p) {
          svie::SampleGrid mask1{g, g, Grid(len, len)};
          svie::SampleGrid mask2{g, g, Grid(len, len)};
          mask1.values(p, q) = problem.k1(x, y, g.points[p], g.points[q]);
          mask2.values(p, q) = problem.k2(x, y, g.points[p], g.points[q]);
          const auto b1 = svie::coeffs_from_samples(mask1);
          const auto b2 = svie::coeffs_from_samples(mask2);
          double acc = 0.0;
          for (int i = 1; i <= len; ++i) {
            for (int j = 1; j <= len; ++j) {
              acc += b1.b(i - 1, j - 1) * svie::p_int(i, x) * svie::p_int(j, y);
              acc += b2.b(i - 1, j - 1) * svie::q_int(i, x, path) *
                     svie::q_int(j, y, path);
            }
          }
          a(row, q * len + p) = (row == q * len + p ? 1.0 : 0.0) - acc;
        }
      }
    }
  }
  return a;
}

std::vector<double> flatten(const Grid& g) {
  std::vector<double> flat(g.size());
  for (int n = 0; n < g.cols; ++n)
    for (int m = 0; m < g.rows; ++m) flat[n * g.rows + m] = g(m, n);
  return flat;
}

}  // namespace

TEST_CASE("zero kernels assemble to the identity and return the forcing") {
  const ProblemSpec problem = svie::zero_kernel_problem();
  for (int level : {0, 1, 2}) {
    const auto prep = svie::prepare(problem, level);
    const BrownianPath path = svie::constant_path(prep.min_grid_count());
    const AssembledSystem sys = svie::assemble_prepared(prep, path);
    for (int r = 0; r < sys.a.rows; ++r)
      for (int c = 0; c < sys.a.cols; ++c)
        CHECK(sys.a(r, c) == (r == c ? 1.0 : 0.0));
    const PathSolution sol = svie::solve_dense(sys);
    const CollocationGrid g = svie::collocation_grid(level);
    for (int n = 0; n < g.size(); ++n)
      for (int m = 0; m < g.size(); ++m)
        CHECK(same_bits(sol.g(m, n),
                        problem.f(g.points[m], g.points[n])));
  }
}

TEST_CASE("assembly matches the literal masked-transform reference") {
  PathEnsembleConfig cfg;
  cfg.paths = 2;
  cfg.seed = 0xFEED5EEDu;
  cfg.grid_count = 8;  // level-1 alignment
  const BrownianPath path = svie::simulate_path(cfg, 1);
  for (const ProblemSpec& problem :
       {svie::paper_example_problem(), svie::det_xy_problem()}) {
    const AssembledSystem sys = svie::assemble(problem, path, 1);
    const Grid ref = reference_matrix(problem, path, 1);
    REQUIRE(sys.a.rows == 16);
    for (int r = 0; r < 16; ++r)
      for (int c = 0; c < 16; ++c)
        CHECK_THAT(sys.a(r, c), WithinAbs(ref(r, c), 1e-12));
    const CollocationGrid g = svie::collocation_grid(1);
    for (int n = 0; n < 4; ++n)
      for (int m = 0; m < 4; ++m)
        CHECK(same_bits(sys.rhs[n * 4 + m],
                        problem.f(g.points[m], g.points[n])));
  }
}

TEST_CASE("dense solve agrees with an independent elimination oracle") {
  PathEnsembleConfig cfg;
  cfg.paths = 3;
  cfg.seed = 0x0DDF1B5u;
  cfg.grid_count = 8;
  const ProblemSpec problem = svie::paper_example_problem();
  for (int r = 0; r < cfg.paths; ++r) {
    const BrownianPath path = svie::simulate_path(cfg, r);
    const AssembledSystem sys = svie::assemble(problem, path, 1);
    const PathSolution sol = svie::solve_dense(sys);
    const std::vector<double> oracle =
        testsupport::gauss_jordan_solve(sys.a, sys.rhs);
    const std::vector<double> flat = flatten(sol.g);
    for (int k = 0; k < sys.a.rows; ++k)
      CHECK_THAT(flat[k], WithinAbs(oracle[k], 1e-10));
    double rhs_norm = 0.0;
    for (double v : sys.rhs) rhs_norm = std::max(rhs_norm, std::fabs(v));
    CHECK(sol.residual <= 1e-8 * (1.0 + rhs_norm));
    CHECK(sol.min_pivot > 0.0);
    CHECK(sol.origin.seed == cfg.seed);
    CHECK(sol.origin.path_index == r);
  }
}

TEST_CASE("manufactured deterministic problem converges to xy") {
  const ProblemSpec problem = svie::det_xy_problem();

  // The forcing term really is u - integral of K1 * u for u = xy.
  const svie::QuadSpec quad{256};
  for (double x : {0.25, 0.6875, 1.0}) {
    for (double y : {0.125, 0.5, 0.9375}) {
      const double integral = svie::quad2d(
          [](double s, double t) { return s * t; }, x, y, quad);
      CHECK_THAT(problem.f(x, y), WithinAbs(x * y - integral, 1e-9));
    }
  }

  std::vector<double> errs;
  for (int level = 0; level <= 4; ++level) {
    const auto prep = svie::prepare(problem, level);
    const PathSolution sol = svie::solve_prepared(
        prep, svie::constant_path(prep.min_grid_count()));
    const CollocationGrid g = svie::collocation_grid(level);
    double emax = 0.0;
    for (int n = 0; n < g.size(); ++n)
      for (int m = 0; m < g.size(); ++m)
        emax = std::max(emax,
                        std::fabs(sol.g(m, n) - g.points[m] * g.points[n]));
    errs.push_back(emax);
  }
  for (std::size_t k = 1; k < errs.size(); ++k) CHECK(errs[k] <= errs[k - 1]);
  CHECK(errs[4] <= 0.5 * errs[1]);
  // Regression band from the recorded run: max errors decay roughly 3.5x per
  // level, 2.4e-2 / 7.9e-3 / 2.3e-3 / 6.2e-4 / 1.6e-4 for levels 0..4.
  CHECK(errs[1] < 1.2e-2);
  CHECK(errs[4] < 2.5e-4);
}

TEST_CASE("zero-increment path reduces to the deterministic system bitwise") {
  const ProblemSpec full = svie::paper_example_problem();
  ProblemSpec dropped = full;
  dropped.k2 = [](double, double, double, double) { return 0.0; };

  const int level = 1;
  const auto prep_full = svie::prepare(full, level);
  const BrownianPath flat = svie::constant_path(prep_full.min_grid_count());
  const PathSolution a = svie::solve_prepared(prep_full, flat);
  const PathSolution b = svie::solve_once(dropped, flat, level);
  for (int n = 0; n < a.g.cols; ++n)
    for (int m = 0; m < a.g.rows; ++m)
      CHECK(same_bits(a.g(m, n), b.g(m, n)));

  // With the stochastic kernel absent the result ignores the path entirely.
  PathEnsembleConfig cfg;
  cfg.paths = 1;
  cfg.seed = 0xD15EA5Eu;
  cfg.grid_count = prep_full.min_grid_count();
  const PathSolution c = svie::solve_once(dropped, svie::simulate_path(cfg, 0),
                                          level);
  for (int n = 0; n < b.g.cols; ++n)
    for (int m = 0; m < b.g.rows; ++m)
      CHECK(same_bits(b.g(m, n), c.g(m, n)));
}

TEST_CASE("solution is invariant under relabeling of the flat ordering") {
  PathEnsembleConfig cfg;
  cfg.paths = 1;
  cfg.seed = 0x5CA11EDu;
  cfg.grid_count = 8;
  const AssembledSystem sys = svie::assemble(svie::paper_example_problem(),
                                             svie::simulate_path(cfg, 0), 1);
  const int dim = sys.a.rows;
  std::vector<int> perm(dim);
  std::iota(perm.begin(), perm.end(), 0);
  // Fixed scramble: deterministic Fisher-Yates with a tiny LCG.
  std::uint64_t state = 12345;
  for (int k = dim - 1; k > 0; --k) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    std::swap(perm[k], perm[static_cast<int>((state >> 33) % (k + 1))]);
  }
  AssembledSystem scrambled = sys;
  for (int r = 0; r < dim; ++r) {
    scrambled.rhs[r] = sys.rhs[perm[r]];
    for (int c = 0; c < dim; ++c) scrambled.a(r, c) = sys.a(perm[r], perm[c]);
  }
  const std::vector<double> base = flatten(svie::solve_dense(sys).g);
  const std::vector<double> relabeled =
      flatten(svie::solve_dense(scrambled).g);
  for (int k = 0; k < dim; ++k)
    CHECK_THAT(relabeled[k], WithinAbs(base[perm[k]], 1e-10));
}

TEST_CASE("off-grid evaluation expands the solved surface") {
  PathEnsembleConfig cfg;
  cfg.paths = 1;
  cfg.seed = 0x0FF641Du;
  cfg.grid_count = 16;
  const int level = 2;
  const PathSolution sol = svie::solve_once(svie::paper_example_problem(),
                                            svie::simulate_path(cfg, 0), level);
  const CollocationGrid g = svie::collocation_grid(level);

  // Interpolation at the collocation pairs.
  for (int n = 0; n < g.size(); n += 3)
    for (int m = 0; m < g.size(); m += 2)
      CHECK_THAT(svie::evaluate_offgrid(sol, g.points[m], g.points[n]),
                 WithinAbs(sol.g(m, n), 1e-11));

  // Same expansion as the tensor-module route, point for point.
  const svie::SampleGrid samples{g, g, sol.g};
  testsupport::FixtureRng rng(0xE5C4B8u);
  for (int k = 0; k < 50; ++k) {
    const double x = rng.uniform(0.0, 1.0);
    const double y = rng.uniform(0.0, 1.0);
    CHECK(svie::evaluate_offgrid(sol, x, y) ==
          svie::reconstruct_from_samples(samples, x, y));
  }
  CHECK_THROWS_AS(svie::evaluate_offgrid(sol, 1.1, 0.2), std::domain_error);
  CHECK_THROWS_AS(svie::evaluate_offgrid(sol, 0.2, -0.01), std::domain_error);

  // A constant surface reconstructs to the same constant everywhere.
  PathSolution flat;
  flat.level = 1;
  flat.g = Grid(4, 4);
  for (int n = 0; n < 4; ++n)
    for (int m = 0; m < 4; ++m) flat.g(m, n) = 3.25;
  CHECK_THAT(svie::evaluate_offgrid(flat, 0.31, 0.77),
             WithinAbs(3.25, 1e-12));
}

TEST_CASE("assembly reports non-finite samples with their coordinates") {
  ProblemSpec bad = svie::zero_kernel_problem();
  bad.name = "bad";
  bad.k1 = [](double, double, double s, double) {
    return s > 0.7 ? std::numeric_limits<double>::infinity() : 0.0;
  };
  CHECK_THROWS_MATCHES(
      svie::prepare(bad, 1), svie::assembly_error,
      Catch::Matchers::MessageMatches(
          Catch::Matchers::ContainsSubstring("s=0.875")));

  ProblemSpec bad_f = svie::zero_kernel_problem();
  bad_f.f = [](double x, double) {
    return x > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
  };
  CHECK_THROWS_AS(svie::prepare(bad_f, 0), svie::assembly_error);

  ProblemSpec missing = svie::zero_kernel_problem();
  missing.k2 = nullptr;
  CHECK_THROWS_AS(svie::prepare(missing, 0), std::domain_error);
  CHECK_THROWS_AS(svie::prepare(svie::zero_kernel_problem(), 6),
                  std::domain_error);
  CHECK_THROWS_AS(svie::prepare(svie::zero_kernel_problem(), -1),
                  std::domain_error);
}

TEST_CASE("singular systems raise an error carrying the path origin") {
  AssembledSystem sys;
  sys.half_x = 1;
  sys.half_y = 1;
  sys.origin = svie::PathSeed{0xABCDu, 7};
  sys.a = Grid(4, 4);
  for (int c = 0; c < 4; ++c) {
    sys.a(0, c) = 1.0;
    sys.a(1, c) = 1.0;  // duplicate row
    sys.a(2, c) = c;
    sys.a(3, c) = c * c;
  }
  sys.rhs = {1.0, 2.0, 3.0, 4.0};
  try {
    svie::solve_dense(sys);
    FAIL("expected a singularity error");
  } catch (const svie::singular_system_error& e) {
    CHECK(e.origin.seed == 0xABCDu);
    CHECK(e.origin.path_index == 7);
    CHECK(e.pivot < 1e-12 * svie::inf_norm(sys.a));
  }

  AssembledSystem shape = sys;
  shape.rhs.pop_back();
  CHECK_THROWS_AS(svie::solve_dense(shape), std::domain_error);
}

TEST_CASE("registry problems carry the advertised formulas") {
  const ProblemSpec paper = svie::registry_lookup("paper-example");
  CHECK_THAT(paper.k1(1.0, 1.0, 0.0, 0.0), WithinRel(2.0, 1e-15));
  CHECK_THAT(paper.k2(1.0, 1.0, 0.0, 0.0), WithinRel(2.0, 1e-15));
  CHECK_THAT(paper.f(1.0, 1.0), WithinRel(7.0 / 6.0, 1e-15));

  const ProblemSpec zero = svie::registry_lookup("zero-kernel");
  CHECK(zero.k1(0.3, 0.4, 0.1, 0.2) == 0.0);
  CHECK(zero.k2(0.3, 0.4, 0.1, 0.2) == 0.0);

  CHECK_THROWS_MATCHES(
      svie::registry_lookup("missing-problem"), std::domain_error,
      Catch::Matchers::MessageMatches(
          Catch::Matchers::ContainsSubstring("paper-example") &&
          Catch::Matchers::ContainsSubstring("det-xy") &&
          Catch::Matchers::ContainsSubstring("zero-kernel")));
}
