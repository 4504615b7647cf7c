// Closed-form collision analysis in the centre-of-mass frame: distance and
// time of closest approach, deflection angle, apse line, the explicit soft
// scattering operator and its hardening sweep toward Boltzmann scattering.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "spherelab/potential.hpp"
#include "spherelab/types.hpp"

namespace spherelab {

// Polar frame of the reduced motion: R0 rotates e3 onto the normalized
// y0 ^ w0 (an arbitrary perpendicular direction when the motion is radial),
// the planar angle uses e(theta) = (sin theta, cos theta).
struct PolarFrame {
  Mat3 R0 = Mat3::Identity();
  double theta0 = 0.0;
  double rho0 = 0.0;

  static PolarFrame build(const Vec3& y0, const Vec3& w0);
  Vec3 in_plane(double theta) const {
    return R0 * Vec3(std::sin(theta), std::cos(theta), 0.0);
  }
};

// Distance of closest approach: the unique root in (0, 1) of
//   g(rho) = 2 E0 - A0 / rho^2 - 4 Phi_eps(rho),
// located by bracketed bisection to 1e-14 in rho.
double rho_star(const CollisionInvariants& inv, const HardenedPotential& pot);

// Time of closest approach tau* = int_{rho*}^{1} dr / sqrt(g(r)). The
// radicand vanishes linearly at rho*, so the substitution
// r = rho* + (1 - rho*) u^2 removes the inverse-square-root singularity
// before adaptive quadrature is applied. Returns 0 for grazing data.
double tau_star(const CollisionInvariants& inv, const HardenedPotential& pot,
                double quad_tol = 1e-10);

// All radial quantities of one collision, with quadrature error estimates.
struct RadialAnalysis {
  double rho_star = 1.0;
  double g_prime = 0.0;      // g'(rho*), > 0 away from grazing
  double tau_star = 0.0;
  double tau_error = 0.0;
  double delta_theta = 0.0;  // |theta* - theta0| >= 0
  double theta_error = 0.0;
  bool grazing = false;
  bool ode_fallback = false;  // near-grazing: tau* taken from the reduced ODE
};

RadialAnalysis radial_analysis(const CollisionInvariants& inv,
                               const HardenedPotential& pot,
                               double quad_tol = 1e-10);

// Deflection angle theta* of the apse. With e(theta) = (sin, cos) and R0 e3
// aligned with y0 ^ w0 the planar angular velocity is
// thetadot = -|y0 ^ w0| / rho^2, so theta* = theta0 - int_{rho*}^{1}
// sqrt(A0) / (r^2 sqrt(g(r))) dr. Requires a non-degenerate frame (A0 > 0).
double deflection_angle(const PhasePoint& z0, const HardenedPotential& pot,
                        double quad_tol = 1e-10);

// Apse direction omega* in S^2; reduces to y0 when the motion is radial or
// grazing.
Vec3 apse_line(const PhasePoint& z0, const HardenedPotential& pot,
               double quad_tol = 1e-10);

struct CollisionAnalysis {
  double rho_star = 1.0;
  double tau_star = 0.0;
  double theta_star = 0.0;
  Vec3 apse{Vec3::Zero()};
  double epsilon = 0.0;
  CollisionInvariants invariants_in;
};

CollisionAnalysis analyze_collision(const PhasePoint& z0,
                                    const HardenedPotential& pot,
                                    double quad_tol = 1e-10);

// The scattering operator: positions move to the reflected exit configuration
// advanced by tau* of centre-of-mass drift, velocities reflect about
// nu* = (omega*, -omega*)/sqrt(2).
struct SoftScatteringResult {
  PhasePoint pre;
  PhasePoint post;
  Vec6 nu_hat_star{Vec6::Zero()};
  CollisionAnalysis analysis;
};

SoftScatteringResult soft_scatter(const PhasePoint& z0,
                                  const HardenedPotential& pot,
                                  double quad_tol = 1e-10);

struct SweepRow {
  double eps = 0.0;
  double rho_star = 0.0;
  double tau_star = 0.0;
  double theta_star = 0.0;
  Vec3 apse{Vec3::Zero()};
  double scatter_err = 0.0;  // |Pi2 sigma_eps Z0 - sigma_n Pi2 Z0|
  bool ok = false;
  std::string note;
};

struct SweepSummary {
  double slope = 0.0;         // log tau* vs log eps
  double slope_stderr = 0.0;
  double beta_inverse = 0.0;
  int fit_skip = 0;           // pre-asymptotic points dropped from the fit
};

struct SweepTable {
  std::vector<SweepRow> rows;  // ordered by decreasing eps
  SweepSummary summary;
};

struct SweepOptions {
  int fit_skip = 2;
  int threads = 1;
  double quad_tol = 1e-10;
};

// Per-epsilon collision analysis plus the distance to Boltzmann scattering.
// Rows are computed independently (optionally in parallel) and emitted in
// grid order; a failing row is annotated, not fatal.
SweepTable hardening_sweep(const PhasePoint& z0, const ReferencePotential& base,
                           const std::vector<double>& eps_grid,
                           const SweepOptions& opt = {});

}  // namespace spherelab
