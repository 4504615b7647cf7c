#include "spherelab/potential.hpp"

#include <cmath>
#include <limits>

#include "spherelab/numerics.hpp"

namespace spherelab {

ReferencePotential standard_family(double s, double beta) {
  if (!(s > 0.0))
    throw std::invalid_argument(
        "standard_family: s must be positive (origin blow-up violated)");
  if (!(beta > 2.0))
    throw std::invalid_argument("standard_family: beta must exceed 2");
  auto value = [s, beta](double r) -> double {
    if (r >= 1.0) return 0.0;
    if (r <= 0.0) return std::numeric_limits<double>::infinity();
    return std::pow(r, -s) * std::pow(1.0 - r, beta);
  };
  // Phi0'(r) = r^(-s-1) (1-r)^(beta-1) (-s(1-r) - beta r) on (0,1).
  auto slope = [s, beta](double r) -> double {
    if (r >= 1.0) return 0.0;
    if (r <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::pow(r, -s - 1.0) * std::pow(1.0 - r, beta - 1.0) *
           (-s * (1.0 - r) - beta * r);
  };
  return ReferencePotential(value, slope, s, beta);
}

double inverse_on_support(const ReferencePotential& p, double value) {
  if (!(value > 0.0))
    throw std::invalid_argument(
        "inverse_on_support: value must be positive (Phi0 vanishes on [1,inf))");
  double lo = 1e-12;
  // Phi0 blows up at the origin, so a bracket exists; walk lo down if the
  // supplied potential stays finite but still exceeds value further in.
  while (!(p.value(lo) > value)) {
    lo *= 0.5;
    if (lo < 1e-300)
      throw std::invalid_argument(
          "inverse_on_support: potential does not reach the requested value");
  }
  // Phi0 is strictly decreasing on (0,1): plain bisection is monotone-safe.
  auto f = [&](double r) { return p.value(r) - value; };
  return num::bisect(f, lo, 1.0, 1e-15, 200);
}

ValidationReport validate_hypotheses(ReferencePotential& p,
                                     std::size_t grid_size, double r0) {
  ValidationReport rep;
  rep.grid_size = grid_size;
  if (grid_size < 100)
    throw std::invalid_argument("validate_hypotheses: grid_size must be >= 100");

  auto fail = [&](const std::string& what, double at) {
    rep.passed = false;
    rep.failure = what;
    rep.failure_point = at;
    return rep;
  };

  const double h = 1.0 / static_cast<double>(grid_size);

  // Blow-up at the origin and compact support.
  if (!(p.value(1e-8) > 1e6))
    return fail("origin blow-up violated: Phi0(1e-8) <= 1e6", 1e-8);
  for (double r : {1.0, 1.5, 2.0}) {
    if (p.value(r) != 0.0) return fail("support exceeds [0,1]: Phi0(r) != 0", r);
  }

  // Sign, monotonicity and convexity on the interior grid. Convexity is
  // checked through second differences; only monotonicity and the envelope
  // constants enter the collision analysis.
  for (std::size_t i = 1; i + 1 < grid_size; ++i) {
    const double r = static_cast<double>(i) * h;
    const double f = p.value(r);
    if (!(f > 0.0)) return fail("Phi0 not positive on (0,1)", r);
    if (!(p.slope(r) < 0.0)) return fail("Phi0' not negative on (0,1)", r);
    const double second =
        p.value(r - h) - 2.0 * f + p.value(r + h);
    if (second < -1e-12 * std::max(1.0, std::abs(f)))
      return fail("Phi0 not convex on (0,1)", r);
  }

  // Envelope constants over [r0, 1 - 1/grid_size].
  HypothesisConstants c;
  c.r0 = r0;
  c.c1 = std::numeric_limits<double>::infinity();
  c.kappa1 = std::numeric_limits<double>::infinity();
  const double beta = p.beta();
  const double upper = 1.0 - h;
  const std::size_t n = grid_size;
  for (std::size_t i = 0; i <= n; ++i) {
    const double r = r0 + (upper - r0) * static_cast<double>(i) /
                              static_cast<double>(n);
    const double env = std::pow(1.0 - r, beta);
    const double denv = std::pow(1.0 - r, beta - 1.0);
    const double ratio_v = p.value(r) / env;
    const double ratio_d = std::abs(p.slope(r)) / denv;
    if (!std::isfinite(ratio_v) || !std::isfinite(ratio_d))
      return fail("envelope ratio not finite", r);
    c.c1 = std::min(c.c1, ratio_v);
    c.c2 = std::max(c.c2, ratio_v);
    c.kappa1 = std::min(c.kappa1, ratio_d);
    c.kappa2 = std::max(c.kappa2, ratio_d);
  }
  if (!(c.c1 > 0.0) || !(c.kappa1 > 0.0))
    return fail("envelope lower constant not positive", r0);

  rep.passed = true;
  rep.constants = c;
  p.set_certified(c);
  return rep;
}

}  // namespace spherelab
