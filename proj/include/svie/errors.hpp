#pragma once
// Error types shared across the library. Plain domain/argument violations use
// the stdlib exceptions directly; these carry extra context that callers need
// for diagnostics or reproduction.
#include <cstdint>
#include <stdexcept>
#include <string>

namespace svie {

// A time coordinate that should sit on the simulation grid does not.
struct off_grid_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A kernel or forcing sample came back non-finite during system assembly.
struct assembly_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Identifies the random path that produced a matrix; enough to regenerate it.
struct PathSeed {
  std::uint64_t seed = 0;
  int path_index = -1;
};

// Dense elimination hit a pivot below the singularity threshold. Carries the
// seed info of the offending path so the failure can be reproduced.
struct singular_system_error : std::runtime_error {
  PathSeed origin;
  double pivot = 0.0;
  singular_system_error(const std::string& what, PathSeed origin_, double pivot_)
      : std::runtime_error(what), origin(origin_), pivot(pivot_) {}
};

// A solve finished but its backward-error check failed the residual contract.
struct residual_error : std::runtime_error {
  PathSeed origin;
  double residual = 0.0;
  residual_error(const std::string& what, PathSeed origin_, double residual_)
      : std::runtime_error(what), origin(origin_), residual(residual_) {}
};

// Every path in a Monte Carlo ensemble failed; there is nothing to average.
struct ensemble_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace svie
