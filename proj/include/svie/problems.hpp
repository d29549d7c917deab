#pragma once
// Built-in problem registry. Problems are code-registered callables; there is
// deliberately no expression parser.
#include <stdexcept>
#include <string>
#include <vector>

#include "svie/solver.hpp"

namespace svie {

// The stochastic demonstration problem: linear kernels in all four variables
// and a forcing term chosen to keep the solution mild on the unit square.
inline ProblemSpec paper_example_problem() {
  ProblemSpec p;
  p.name = "paper-example";
  p.f = [](double x, double y) {
    const double x2 = x * x, y2 = y * y;
    return x + y -
           (1.0 / 12.0) * x * y * (x2 * x + 4.0 * x2 * y + 4.0 * x * y2 + y2 * y);
  };
  p.k1 = [](double x, double y, double s, double t) { return x + y + t - s; };
  p.k2 = [](double x, double y, double s, double t) { return x + y + t + s; };
  return p;
}

// Deterministic manufactured problem with exact solution u(x, y) = xy:
// the kernel integral of the solution is x^2 y^2 / 4, so f = xy - x^2 y^2 / 4.
inline ProblemSpec det_xy_problem() {
  ProblemSpec p;
  p.name = "det-xy";
  p.f = [](double x, double y) { return x * y - x * x * y * y / 4.0; };
  p.k1 = [](double, double, double, double) { return 1.0; };
  p.k2 = [](double, double, double, double) { return 0.0; };
  return p;
}

// Both kernels zero: the equation degenerates to g = f.
inline ProblemSpec zero_kernel_problem() {
  ProblemSpec p;
  p.name = "zero-kernel";
  p.f = [](double x, double y) { return x + y; };
  p.k1 = [](double, double, double, double) { return 0.0; };
  p.k2 = [](double, double, double, double) { return 0.0; };
  return p;
}

// Constant K1 = 16 makes the level-0 collocation matrix exactly singular
// (dyadic entries, nilpotent operator part), so every path fails. Registered
// to exercise failure reporting end to end; solvable at higher levels.
inline ProblemSpec singular_level0_problem() {
  ProblemSpec p;
  p.name = "singular-level0";
  p.f = [](double x, double y) { return x + y; };
  p.k1 = [](double, double, double, double) { return 16.0; };
  p.k2 = [](double, double, double, double) { return 0.0; };
  return p;
}

inline const std::vector<ProblemSpec>& problem_registry() {
  static const std::vector<ProblemSpec> problems = {
      paper_example_problem(), det_xy_problem(), zero_kernel_problem(),
      singular_level0_problem()};
  return problems;
}

inline ProblemSpec registry_lookup(const std::string& name) {
  std::string known;
  for (const ProblemSpec& p : problem_registry()) {
    if (p.name == name) return p;
    if (!known.empty()) known += ", ";
    known += p.name;
  }
  throw std::domain_error("unknown problem '" + name +
                          "'; registered problems: " + known);
}

}  // namespace svie
