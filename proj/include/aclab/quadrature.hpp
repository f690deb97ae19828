#pragma once

#include <functional>

namespace aclab {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Adaptive 7/15-point Gauss-Kronrod on [a, b].
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, double rel_tol = 0.0, int max_depth = 40);

// Same, throws numeric-failure with the achieved error when tolerance is missed.
double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, double rel_tol = 0.0);

}  // namespace aclab
