#include "spherelab/geometry.hpp"

#include <cmath>

namespace spherelab {

ReducedState to_reduced(const PhasePoint& z) {
  ReducedState r;
  r.y = z.x - z.xbar;
  r.w = z.v - z.vbar;
  r.ybar = 0.5 * (z.x + z.xbar);
  r.wbar = 0.5 * (z.v + z.vbar);
  return r;
}

PhasePoint from_reduced(const ReducedState& r) {
  PhasePoint z;
  z.x = r.ybar + 0.5 * r.y;
  z.xbar = r.ybar - 0.5 * r.y;
  z.v = r.wbar + 0.5 * r.w;
  z.vbar = r.wbar - 0.5 * r.w;
  return z;
}

Vec3 linear_momentum(const PhasePoint& z, double m) { return m * (z.v + z.vbar); }

Vec3 angular_momentum(const PhasePoint& z, const Vec3& a, double m) {
  return -m * (a - z.x).cross(z.v) - m * (a - z.xbar).cross(z.vbar);
}

double kinetic_energy(const PhasePoint& z, double m) {
  return m * z.v.squaredNorm() + m * z.vbar.squaredNorm();
}

CollisionInvariants collision_invariants(const ReducedState& r) {
  CollisionInvariants inv;
  inv.E0 = 0.5 * r.w.squaredNorm();
  inv.A0 = r.y.cross(r.w).squaredNorm();
  return inv;
}

ConfigClass classify(const PhasePoint& z, double tol) {
  const double gap = (z.x - z.xbar).norm() - 1.0;
  if (std::abs(gap) > tol) return ConfigClass::NonContact;
  const double closing = (z.x - z.xbar).dot(z.v - z.vbar);
  if (closing < -tol) return ConfigClass::PreCollisional;
  if (closing > tol) return ConfigClass::PostCollisional;
  return ConfigClass::Grazing;
}

}  // namespace spherelab
