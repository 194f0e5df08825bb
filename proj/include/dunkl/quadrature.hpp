#pragma once

// Globally adaptive 1-d quadrature: Gauss-Legendre 15 with a nested 7-point
// error estimate, refining the worst interval first. Nodes are computed at
// startup by Newton iteration, so there are no literal node tables to get
// wrong.

#include <functional>

namespace dunkl {

struct QuadratureResult {
  double value = 0;
  double error_estimate = 0;
  bool converged = false;
};

QuadratureResult adaptive_integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                                    int max_intervals = 4000);

// Convenience wrapper that throws std::runtime_error on non-convergence.
double integrate_or_throw(const std::function<double(double)>& f, double a, double b, double abs_tol,
                          int max_intervals = 4000);

}  // namespace dunkl
