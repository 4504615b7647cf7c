// Numerical integration of the soft two-body system and its centre-of-mass
// reduction, with dense output, contact-window detection and conservation
// monitoring.
//
// Free flight is exact for the integrator, so steps outside the support are
// limited only by the exact straight-line entry time into {|y| <= 1}; inside
// the support the step is capped at eps^(1/beta)/10 so the collision is
// resolved. A step that would cross the support boundary outward is redone so
// that it ends on the boundary; every step therefore sees a one-sidedly
// smooth force.
#pragma once

#include <optional>
#include <vector>

#include "spherelab/ode.hpp"
#include "spherelab/potential.hpp"
#include "spherelab/types.hpp"

namespace spherelab {

struct SoftProblem {
  HardenedPotential potential;
  PhasePoint z0;  // state at time t0
  double t0 = 0.0;
  double t1 = 1.0;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
};

// H = (|v|^2 + |vbar|^2)/2 + Phi_eps(x - xbar).
double soft_hamiltonian(const PhasePoint& z, const HardenedPotential& pot);

// H0 = |w|^2/2 + 2 Phi_eps(y) for the reduced pair.
double reduced_hamiltonian(const Vec3& y, const Vec3& w,
                           const HardenedPotential& pot);

// Dense solution of the full 12-dimensional system.
class SampledTrajectory {
 public:
  SampledTrajectory(ode::DenseSolution<12> sol, std::vector<double> times,
                    double energy_drift)
      : sol_(std::move(sol)), times_(std::move(times)),
        energy_drift_(energy_drift) {}

  const std::vector<double>& times() const { return times_; }
  double energy_drift() const { return energy_drift_; }
  PhasePoint state(double t) const {
    return PhasePoint::from_packed(sol_.eval(t));
  }
  Vec6 velocities(double t) const { return sol_.eval(t).segment<6>(6); }
  double separation(double t) const {
    const Vec12 z = sol_.eval(t);
    return (z.segment<3>(0) - z.segment<3>(3)).norm();
  }
  const ode::DenseSolution<12>& dense() const { return sol_; }

 private:
  ode::DenseSolution<12> sol_;
  std::vector<double> times_;
  double energy_drift_;
};

// Dense solution of the 6-dimensional reduced system (y, w).
class ReducedTrajectory {
 public:
  ReducedTrajectory(ode::DenseSolution<6> sol, std::vector<double> times,
                    double energy_drift)
      : sol_(std::move(sol)), times_(std::move(times)),
        energy_drift_(energy_drift) {}

  const std::vector<double>& times() const { return times_; }
  double energy_drift() const { return energy_drift_; }
  Vec3 y(double t) const { return sol_.eval(t).segment<3>(0); }
  Vec3 w(double t) const { return sol_.eval(t).segment<3>(3); }
  const ode::DenseSolution<6>& dense() const { return sol_; }

 private:
  ode::DenseSolution<6> sol_;
  std::vector<double> times_;
  double energy_drift_;
};

// Runs rejected (throw) when the Hamiltonian drifts by more than 1e-8
// relative over the accepted steps.
SampledTrajectory integrate(const SoftProblem& p);
ReducedTrajectory integrate_reduced(const SoftProblem& p);

// Entrance/exit times of the supports: the first and last roots of
// F(t) = |y(t)|^2 - 1, refined by bisection on the dense output.
struct ContactWindow {
  double tau_minus = 0.0;
  double tau_plus = 0.0;
  double duration = 0.0;
  bool none_flag = false;
};

ContactWindow detect_contact_window(const SampledTrajectory& tr);

// Exact free flight of a phase point by dt (valid while the motion stays
// outside the support).
PhasePoint free_flight(const PhasePoint& z, double dt);

}  // namespace spherelab
