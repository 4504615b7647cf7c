// Repulsive reference potentials on (0, infinity) with compact support in
// [0, 1], and the hardening family obtained by dividing by epsilon.
//
// A reference potential must be strictly decreasing and convex on (0, 1),
// vanish for r >= 1, blow up at the origin, and admit two-sided envelopes
//   c1 (1-r)^beta    <= Phi0(r)   <= c2 (1-r)^beta
//   kappa1 (1-r)^(beta-1) <= |Phi0'(r)| <= kappa2 (1-r)^(beta-1)
// on [r0, 1]. validate_hypotheses() certifies these properties on a grid and
// records the empirical envelope constants.
#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace spherelab {

struct HypothesisConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double r0 = 0.5;
};

class ReferencePotential {
 public:
  using Fn = std::function<double(double)>;

  // value(r) = Phi0(r); slope(r) = dPhi0/dr. s is the origin-singularity
  // exponent, beta the boundary decay exponent.
  ReferencePotential(Fn value, Fn slope, double s, double beta)
      : value_(std::move(value)), slope_(std::move(slope)), s_(s), beta_(beta) {}

  double value(double r) const { return value_(r); }
  double slope(double r) const { return slope_(r); }
  double operator()(double r) const { return value_(r); }

  double singular_exponent() const { return s_; }
  double beta() const { return beta_; }

  const std::optional<HypothesisConstants>& certified() const {
    return certified_;
  }
  void set_certified(const HypothesisConstants& c) { certified_ = c; }

 private:
  Fn value_;
  Fn slope_;
  double s_;
  double beta_;
  std::optional<HypothesisConstants> certified_;
};

// Phi0(r) = r^(-s) (1-r)^beta on (0, 1], zero beyond. Requires s > 0 and
// beta > 2; s <= 0 would kill the blow-up at the origin. (Published
// descriptions of this family sometimes carry the opposite sign convention
// for s; this implementation pins the sign so that Phi0(0+) = infinity
// holds.)
ReferencePotential standard_family(double s, double beta);

// Unique r in (0, 1) with Phi0(r) = value (value > 0), to 1e-14 in r.
double inverse_on_support(const ReferencePotential& p, double value);

struct ValidationReport {
  bool passed = false;
  std::string failure;      // empty when passed
  double failure_point = 0; // grid point of the first violation
  HypothesisConstants constants;
  std::size_t grid_size = 0;
};

// Certifies the sign/monotonicity/convexity conditions on a grid of
// grid_size points and computes empirical envelope constants over
// [r0, 1 - 1/grid_size]. On success the constants are stored in p.
ValidationReport validate_hypotheses(ReferencePotential& p,
                                     std::size_t grid_size, double r0 = 0.5);

// Phi_eps(r) = Phi0(r) / eps with eps in (0, 1).
struct HardenedPotential {
  ReferencePotential base;
  double epsilon;

  HardenedPotential(ReferencePotential b, double eps)
      : base(std::move(b)), epsilon(eps) {
    if (!(eps > 0.0) || !(eps < 1.0))
      throw std::invalid_argument("HardenedPotential: eps must lie in (0,1)");
  }

  double value(double r) const { return base.value(r) / epsilon; }
  double slope(double r) const { return base.slope(r) / epsilon; }
};

}  // namespace spherelab
