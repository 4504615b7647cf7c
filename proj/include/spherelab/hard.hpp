// Exact hard-sphere two-body dynamics: the Boltzmann scattering matrix, the
// linear conservation-law system it solves, collision-time computation,
// trajectory surgery and the mass-inertia quasi-reflection for non-spherical
// collision normals.
#pragma once

#include <optional>

#include "spherelab/types.hpp"

namespace spherelab {

// sigma_n = I - 2 nu nu^T with nu = (n, -n)/sqrt(2): the unique non-trivial
// velocity map conserving linear momentum, angular momentum and kinetic
// energy of a binary contact with unit normal n.
struct ScatteringMatrix {
  Mat6 matrix;
  Vec3 normal;
  Vec6 nu_hat;

  Vec6 apply(const Vec6& velocities) const { return matrix * velocities; }
};

ScatteringMatrix boltzmann_matrix(const Vec3& n);

// The 6x6 system E_n encoding conservation of linear and angular momentum
// (angular momentum measured at the contact midpoint a = n/2, with
// x(tau) = 0). Singular for every unit n: rank 5.
Mat6 conservation_system(const Vec3& n);

// Least t >= 0 with |y0 + t w0| = 1 and inward approach; std::nullopt when
// the free flight never reaches contact. Overlapping data are rejected.
std::optional<double> collision_time(const PhasePoint& z0);

// Piecewise description of the exact hard-sphere solution: free flight,
// followed (when a transversal contact exists) by a single velocity jump.
struct HardTrajectory {
  PhasePoint initial;
  std::optional<double> collision_time;  // empty: no contact, or permanent contact
  Vec6 pre_velocities{Vec6::Zero()};
  Vec6 post_velocities{Vec6::Zero()};
  Vec3 normal{Vec3::Zero()};  // xbar(tau) - x(tau) at contact
  bool grazing = false;
};

HardTrajectory surgery_solve(const PhasePoint& z0);

// State at time t. At t = tau the velocity takes its left limit
// (pre-collisional branch); positions are continuous throughout.
PhasePoint eval_hard(const HardTrajectory& tr, double t);

// Mass and inertia of a rigid body, and the block matrix
// M = diag(sqrt(m) I, sqrt(m) I, sqrt(J), sqrt(J)) acting on 12-dimensional
// generalized velocities.
struct MassInertia {
  double m = 1.0;
  Mat3 J = Mat3::Identity();

  Mat12 block() const;
};

// sigma_beta = M^{-1} (I - 2 nuhat nuhat^T) M with nuhat = M^{-1}nu/|M^{-1}nu|.
// An involution that preserves |M V|; the collision normal nu in velocity
// space is supplied by the caller.
Mat12 quasi_reflection(const MassInertia& mi, const Vec12& nu);

}  // namespace spherelab
