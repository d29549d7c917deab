// Convergence of the collocation scheme on a problem with a known exact
// solution. The deterministic kernel pair (K1 = 1, K2 = 0) with
// f = xy - x^2 y^2 / 4 has exact solution u(x, y) = xy; the piecewise
// constant expansion converges like the cell width, so each level halves
// the max error at the collocation points.
#include <cmath>
#include <cstdio>

#include "svie/problems.hpp"
#include "svie/solver.hpp"

int main() {
  const svie::ProblemSpec problem = svie::det_xy_problem();
  std::printf("%5s %6s %12s %8s\n", "level", "grid", "max_err", "ratio");
  double previous = 0.0;
  for (int level = 0; level <= 4; ++level) {
    const svie::PreparedProblem prep = svie::prepare(problem, level);
    const svie::BrownianPath flat =
        svie::constant_path(prep.min_grid_count());
    const svie::PathSolution sol = svie::solve_prepared(prep, flat);
    const svie::CollocationGrid grid = svie::collocation_grid(level);
    double max_err = 0.0;
    for (int m = 0; m < grid.size(); ++m) {
      for (int n = 0; n < grid.size(); ++n) {
        const double exact = grid.points[m] * grid.points[n];
        max_err = std::fmax(max_err, std::fabs(sol.g(m, n) - exact));
      }
    }
    if (level == 0) {
      std::printf("%5d %3dx%-3d %12.3e %8s\n", level, grid.size(),
                  grid.size(), max_err, "-");
    } else {
      std::printf("%5d %3dx%-3d %12.3e %8.2f\n", level, grid.size(),
                  grid.size(), max_err, previous / max_err);
    }
    previous = max_err;
  }
  return 0;
}
