// Coordinate transforms, conservation functionals and contact classification.
#pragma once

#include "spherelab/types.hpp"

namespace spherelab {

ReducedState to_reduced(const PhasePoint& z);
PhasePoint from_reduced(const ReducedState& r);

// LM(Z) = m v + m vbar.
Vec3 linear_momentum(const PhasePoint& z, double m = kMass);

// AM(Z; a) = -m (a - x) ^ v - m (a - xbar) ^ vbar.
Vec3 angular_momentum(const PhasePoint& z, const Vec3& a, double m = kMass);

// KE(Z) = m |v|^2 + m |vbar|^2 (functional convention, no 1/2 factor; the
// soft Hamiltonian carries the 1/2 separately).
double kinetic_energy(const PhasePoint& z, double m = kMass);

// E0 and A0 of the reduced pair (y, w).
CollisionInvariants collision_invariants(const ReducedState& r);

// Contact classification: within tol of |x - xbar| = 1 the sign of
// (x - xbar).(v - vbar) separates approaching, separating and grazing
// configurations; everything else is NonContact.
ConfigClass classify(const PhasePoint& z, double tol = kClassifyTol);

}  // namespace spherelab
