#include "spherelab/hard.hpp"

#include <cmath>
#include <stdexcept>

#include "spherelab/geometry.hpp"

namespace spherelab {

namespace {

void require_unit(const Vec3& n) {
  if (std::abs(n.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("collision normal must be a unit vector");
}

}  // namespace

ScatteringMatrix boltzmann_matrix(const Vec3& n) {
  require_unit(n);
  ScatteringMatrix s;
  s.normal = n;
  s.nu_hat << n, -n;
  s.nu_hat /= std::sqrt(2.0);
  s.matrix = Mat6::Identity() - 2.0 * (s.nu_hat * s.nu_hat.transpose());
  return s;
}

Mat6 conservation_system(const Vec3& n) {
  require_unit(n);
  const double n1 = n(0), n2 = n(1), n3 = n(2);
  Mat6 E;
  E << 1, 0, 0, 1, 0, 0,            //
      0, 1, 0, 0, 1, 0,             //
      0, 0, 1, 0, 0, 1,             //
      0, -n3, n2, 0, n3, -n2,       //
      n3, 0, -n1, -n3, 0, n1,       //
      -n2, n1, 0, n2, -n1, 0;
  return E;
}

std::optional<double> collision_time(const PhasePoint& z0) {
  const Vec3 y0 = z0.x - z0.xbar;
  const Vec3 w0 = z0.v - z0.vbar;
  const double a = w0.squaredNorm();
  const double b = y0.dot(w0);
  const double c = y0.squaredNorm() - 1.0;
  if (c < -2.0 * kGeomTol)
    throw std::invalid_argument("collision_time: overlapping initial data");

  if (a == 0.0) return std::nullopt;  // static pair, at most permanent touch

  // Starting on the boundary: an inward product means contact right now; a
  // tangential or outward one means the free flight never re-enters (the
  // quadratic's other root lies in the past).
  if (c <= 2.0 * kGeomTol) {
    if (b < 0.0) return 0.0;
    return std::nullopt;
  }

  const double disc = b * b - a * c;
  if (disc < 0.0) return std::nullopt;
  // Stable quadratic: q = -(b + sign(b) sqrt(disc)); roots q/a and c/q.
  const double sq = std::sqrt(disc);
  const double q = -(b + (b >= 0.0 ? sq : -sq));
  const double t1 = q / a;
  const double t2 = (q != 0.0) ? c / q : t1;
  const double tmin = std::min(t1, t2);
  // The earlier root is the entry (derivative 2(y.w) <= 0 there); a negative
  // entry time means the contact lies in the past.
  if (tmin < 0.0) return std::nullopt;
  return tmin;
}

HardTrajectory surgery_solve(const PhasePoint& z0) {
  const Vec3 y0 = z0.x - z0.xbar;
  const Vec3 w0 = z0.v - z0.vbar;
  HardTrajectory tr;
  tr.initial = z0;
  tr.pre_velocities = z0.velocities();
  tr.post_velocities = tr.pre_velocities;

  const double a = w0.squaredNorm();
  const double b = y0.dot(w0);
  const double c = y0.squaredNorm() - 1.0;
  if (c < -2.0 * kGeomTol)
    throw std::invalid_argument("surgery_solve: overlapping initial data");

  // Permanent contact (static touching pair): the linear trajectory already
  // solves the constrained system.
  if (a == 0.0) {
    tr.grazing = (c <= 2.0 * kGeomTol);
    return tr;
  }

  // Grazing contact, either now (tangential touch) or at the closest
  // approach ahead (discriminant ~ 0): positions keep their free flight and
  // velocities never jump.
  const double disc = b * b - a * c;
  if (c <= 2.0 * kGeomTol && std::abs(b) <= kGeomTol) {
    tr.grazing = true;
    tr.collision_time = 0.0;
    return tr;
  }
  if (std::abs(disc) <= 1e-14) {
    const double tau = -b / a;
    if (tau >= 0.0) {
      tr.grazing = true;
      tr.collision_time = tau;
    }
    return tr;
  }

  const auto tau = collision_time(z0);
  if (!tau) return tr;  // free flight for all time

  tr.collision_time = *tau;
  const Vec3 xt = z0.x + *tau * z0.v;
  const Vec3 xbt = z0.xbar + *tau * z0.vbar;
  tr.normal = xbt - xt;
  const ScatteringMatrix sigma = boltzmann_matrix(tr.normal.normalized());
  tr.normal = sigma.normal;
  tr.post_velocities = sigma.apply(tr.pre_velocities);
  return tr;
}

PhasePoint eval_hard(const HardTrajectory& tr, double t) {
  PhasePoint z = tr.initial;
  if (!tr.collision_time || tr.grazing || t <= *tr.collision_time) {
    z.x += t * z.v;
    z.xbar += t * z.vbar;
    return z;
  }
  const double tau = *tr.collision_time;
  const Vec3 vp = tr.post_velocities.segment<3>(0);
  const Vec3 vbp = tr.post_velocities.segment<3>(3);
  z.x += tau * z.v + (t - tau) * vp;
  z.xbar += tau * z.vbar + (t - tau) * vbp;
  z.v = vp;
  z.vbar = vbp;
  return z;
}

Mat12 MassInertia::block() const {
  if (!(m > 0.0)) throw std::invalid_argument("MassInertia: mass must be positive");
  Eigen::SelfAdjointEigenSolver<Mat3> es(J);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("MassInertia: J must be symmetric positive definite");
  const Mat3 sqrtJ = es.operatorSqrt();
  Mat12 M = Mat12::Zero();
  const double sm = std::sqrt(m);
  M.block<3, 3>(0, 0) = sm * Mat3::Identity();
  M.block<3, 3>(3, 3) = sm * Mat3::Identity();
  M.block<3, 3>(6, 6) = sqrtJ;
  M.block<3, 3>(9, 9) = sqrtJ;
  return M;
}

Mat12 quasi_reflection(const MassInertia& mi, const Vec12& nu) {
  if (std::abs(nu.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("quasi_reflection: nu must be a unit vector");
  const Mat12 M = mi.block();
  Eigen::FullPivLU<Mat12> lu(M);
  if (!lu.isInvertible())
    throw std::invalid_argument("quasi_reflection: singular mass-inertia matrix");
  const Mat12 Minv = lu.inverse();
  Vec12 nu_hat = Minv * nu;
  nu_hat /= nu_hat.norm();
  const Mat12 refl = Mat12::Identity() - 2.0 * (nu_hat * nu_hat.transpose());
  return Minv * refl * M;
}

}  // namespace spherelab
