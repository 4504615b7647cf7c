// Small numerical utilities: adaptive quadrature, bracketed root refinement
// and least-squares line fits for log-log rate estimates.
#pragma once

#include <functional>
#include <span>
#include <vector>

namespace spherelab::num {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // conservative absolute error estimate
  long evals = 0;
};

// Adaptive Simpson rule with Richardson extrapolation on each accepted panel.
// abs_tol is an absolute tolerance for the whole interval.
QuadResult adaptive_simpson(const std::function<double(double)>& f, double a,
                            double b, double abs_tol, int max_depth = 48);

// Bisection on a bracketing interval [lo, hi] with f(lo) and f(hi) of opposite
// sign. Runs until the bracket width drops below x_tol or max_iter is hit.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double x_tol, int max_iter = 200);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

// Ordinary least squares y = slope * x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace spherelab::num
