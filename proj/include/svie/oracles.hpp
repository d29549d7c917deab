#pragma once
// Brute-force reference implementations, kept deliberately dumb: composite
// midpoint quadrature over a rectangle, the discrete double stochastic sum
// (optionally with the diagonal removed), and ensemble moment estimates of
// single stochastic integrals. Tests use these as independent oracles; they
// are also part of the public verification API.
#include <cmath>
#include <stdexcept>
#include <string>

#include "svie/brownian.hpp"

namespace svie {

struct QuadSpec {
  int subdivisions = 256;  // cells per axis, >= 1
};

// Composite-midpoint approximation of the rectangle integral
// int_0^y int_0^x phi(s, t) ds dt. Second-order accurate for smooth phi.
template <class F2>
double quad2d(const F2& phi, double x, double y, const QuadSpec& spec) {
  if (spec.subdivisions < 1) {
    throw std::domain_error("quad2d: subdivisions must be >= 1, got " +
                            std::to_string(spec.subdivisions));
  }
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
    throw std::domain_error("quad2d: upper limits must lie in [0, 1]");
  }
  const int n = spec.subdivisions;
  const double hs = x / n;
  const double ht = y / n;
  double total = 0.0;
  for (int b = 0; b < n; ++b) {
    const double t = (b + 0.5) * ht;
    double line = 0.0;
    for (int a = 0; a < n; ++a) {
      const double v = phi((a + 0.5) * hs, t);
      if (!std::isfinite(v)) {
        throw std::domain_error("quad2d: integrand sample is not finite");
      }
      line += v;
    }
    total += line;
  }
  return total * hs * ht;
}

// Discrete double stochastic sum with left-point sampling:
//   sum_k sum_l phi(t_k, s_l) * dB_k * dB_l,   t_k = k*step, s_l = l*step.
// With restrict_offdiag the diagonal terms k == l are dropped, which is the
// step-function approximation of the double integral that suppresses the
// quadratic-variation contribution.
template <class F2>
double double_ito_sum(const F2& phi, const BrownianPath& path,
                      bool restrict_offdiag) {
  const int cells = path.grid_count();
  double total = 0.0;
  for (int k = 0; k < cells; ++k) {
    const double t_k = k * path.step;
    const double db_k = path.values[k + 1] - path.values[k];
    for (int l = 0; l < cells; ++l) {
      if (restrict_offdiag && l == k) continue;
      const double db_l = path.values[l + 1] - path.values[l];
      total += phi(t_k, l * path.step) * db_k * db_l;
    }
  }
  return total;
}

struct MomentEstimate {
  double mean = 0.0;
  double variance = 0.0;
  int samples = 0;
};

// Sample mean and (unbiased) variance of q_int(i, 1, .) over an independent
// path ensemble. Statistical check of the single-integral second moment,
// which should be the squared L2 norm of the basis function: 1 / scale(i).
inline MomentEstimate ito_moment_check(int i, const PathEnsembleConfig& ensemble) {
  if (ensemble.paths < 1000) {
    throw std::domain_error(
        "ito_moment_check: need at least 1000 paths for a stable estimate, "
        "got " + std::to_string(ensemble.paths));
  }
  const HaarIndex idx = decompose_index(i);
  double mean = 0.0;
  double m2 = 0.0;
  for (int r = 0; r < ensemble.paths; ++r) {
    const BrownianPath path = simulate_path(ensemble, r);
    const double q = q_int(idx, 1.0, path);
    const double delta = q - mean;
    mean += delta / (r + 1);
    m2 += delta * (q - mean);
  }
  MomentEstimate out;
  out.samples = ensemble.paths;
  out.mean = mean;
  out.variance = m2 / (ensemble.paths - 1);
  return out;
}

}  // namespace svie
