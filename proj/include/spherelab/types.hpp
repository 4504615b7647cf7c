// Core phase-space types shared by every module: full two-body phase points,
// centre-of-mass reduced states and the conserved quantities of a collision.
#pragma once

#include <Eigen/Dense>

namespace spherelab {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat12 = Eigen::Matrix<double, 12, 12>;

// Both bodies have unit diameter; the mass is 1 throughout except where an
// explicit mass-inertia matrix enters (quasi-reflection of non-spherical
// bodies).
inline constexpr double kMass = 1.0;

// Admissibility margin for the hard-sphere phase space |x - xbar| >= 1.
inline constexpr double kGeomTol = 1e-9;
// Tolerance used when classifying contact configurations.
inline constexpr double kClassifyTol = 1e-12;

// Full 12-dimensional state Z = [x, xbar, v, vbar] of two bodies.
struct PhasePoint {
  Vec3 x{Vec3::Zero()};
  Vec3 xbar{Vec3::Zero()};
  Vec3 v{Vec3::Zero()};
  Vec3 vbar{Vec3::Zero()};

  Vec6 positions() const {
    Vec6 p;
    p << x, xbar;
    return p;
  }
  Vec6 velocities() const {
    Vec6 p;
    p << v, vbar;
    return p;
  }
  Vec12 packed() const {
    Vec12 z;
    z << x, xbar, v, vbar;
    return z;
  }
  static PhasePoint from_packed(const Vec12& z) {
    return PhasePoint{z.segment<3>(0), z.segment<3>(3), z.segment<3>(6),
                      z.segment<3>(9)};
  }
  bool finite() const { return packed().allFinite(); }
};

// Centre-of-mass frame variables: relative pair (y, w) and COM pair
// (ybar, wbar).
struct ReducedState {
  Vec3 y{Vec3::Zero()};
  Vec3 w{Vec3::Zero()};
  Vec3 ybar{Vec3::Zero()};
  Vec3 wbar{Vec3::Zero()};
};

// Conserved quantities of the reduced radial problem: E0 = |w0|^2 / 2 and
// A0 = |y0 ^ w0|^2.
struct CollisionInvariants {
  double E0 = 0.0;
  double A0 = 0.0;
};

enum class ConfigClass { PreCollisional, PostCollisional, Grazing, NonContact };

}  // namespace spherelab
