#include <doctest.h>

#include <cmath>
#include <random>

#include "spherelab/geometry.hpp"
#include "spherelab/hard.hpp"

using namespace spherelab;

namespace {

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec3 n(g(rng), g(rng), g(rng));
  return n.normalized();
}

Mat3 random_spd(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat3 A;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) A(i, j) = u(rng);
  return A.transpose() * A + 0.1 * Mat3::Identity();
}

}  // namespace

TEST_CASE("boltzmann matrix: head-on momentum exchange") {
  const ScatteringMatrix s = boltzmann_matrix(Vec3(1, 0, 0));
  Vec6 v;
  v << 1, 0, 0, 0, 0, 0;
  const Vec6 post = s.apply(v);
  CHECK(post.segment<3>(0).norm() == doctest::Approx(0.0));
  CHECK((post.segment<3>(3) - Vec3(1, 0, 0)).norm() == doctest::Approx(0.0));
}

TEST_CASE("boltzmann matrix: grazing velocities fixed") {
  const ScatteringMatrix s = boltzmann_matrix(Vec3(0, 0, 1));
  Vec6 v;
  v << 1, 2, 0, -3, 4, 0;  // relative velocity orthogonal to n
  CHECK((s.apply(v) - v).norm() <= 1e-15);
}

TEST_CASE("boltzmann matrix: hand-applied closed form") {
  const ScatteringMatrix s = boltzmann_matrix(Vec3(0, 0, 1));
  Vec6 v;
  v << 1, 2, 3, -1, 0, 1;
  const Vec6 post = s.apply(v);
  CHECK((post.segment<3>(0) - Vec3(1, 2, 1)).norm() <= 1e-14);
  CHECK((post.segment<3>(3) - Vec3(-1, 0, 3)).norm() <= 1e-14);
}

TEST_CASE("boltzmann matrix rejects non-unit normals") {
  CHECK_THROWS_AS(boltzmann_matrix(Vec3(1, 1, 0)), std::invalid_argument);
}

TEST_CASE("scattering matrix algebra on random normals") {
  std::mt19937_64 rng(211);
  for (int trial = 0; trial < 200; ++trial) {
    const ScatteringMatrix s = boltzmann_matrix(random_unit(rng));
    CHECK((s.matrix.transpose() * s.matrix - Mat6::Identity())
              .cwiseAbs()
              .maxCoeff() <= 1e-14);
    CHECK((s.matrix * s.matrix - Mat6::Identity()).cwiseAbs().maxCoeff() <=
          1e-14);
    CHECK(s.matrix.determinant() == doctest::Approx(-1.0).epsilon(1e-12));
  }
}

TEST_CASE("restitution and half-space mapping") {
  std::mt19937_64 rng(223);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int pre_count = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec3 n = random_unit(rng);
    const ScatteringMatrix s = boltzmann_matrix(n);
    Vec6 v;
    for (int i = 0; i < 6; ++i) v[i] = u(rng);
    const Vec6 post = s.apply(v);
    const Vec3 w = v.segment<3>(0) - v.segment<3>(3);
    const Vec3 wp = post.segment<3>(0) - post.segment<3>(3);
    CHECK(std::abs(wp.dot(n) + w.dot(n)) <= 1e-13);

    // sigma_n flips the sign of V . nu_hat.
    const double before = v.dot(s.nu_hat);
    const double after = post.dot(s.nu_hat);
    CHECK(std::abs(after + before) <= 1e-13);
    if (before >= 0) {
      ++pre_count;
      CHECK(after <= 1e-13);
    }
  }
  CHECK(pre_count > 100);
}

TEST_CASE("conservation system is singular of rank 5") {
  std::mt19937_64 rng(227);
  std::uniform_real_distribution<double> u(-2.0, 2.0);

  CHECK(std::abs(conservation_system(Vec3(1, 0, 0)).determinant()) <= 1e-12);

  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 n = random_unit(rng);
    const Mat6 E = conservation_system(n);
    CHECK(std::abs(E.determinant()) <= 1e-12);
    Eigen::JacobiSVD<Mat6> svd(E);
    const auto& sv = svd.singularValues();
    CHECK(sv(5) <= 1e-10);
    CHECK(sv(4) > 1e-3);

    // sigma_n satisfies the linear conservation laws E_n sigma_n V = E_n V.
    Vec6 v;
    for (int i = 0; i < 6; ++i) v[i] = u(rng);
    const Vec6 post = boltzmann_matrix(n).apply(v);
    CHECK((E * post - E * v).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("collision time: closing gap examples") {
  PhasePoint z;
  z.x = Vec3(-2, 0, 0);
  z.xbar = Vec3(0, 0, 0);
  z.v = Vec3(1, 0, 0);
  auto t = collision_time(z);
  REQUIRE(t.has_value());
  CHECK(*t == doctest::Approx(1.0).epsilon(1e-14));

  // Static separated spheres never collide.
  z.v = Vec3::Zero();
  CHECK_FALSE(collision_time(z).has_value());

  // Offset approach: quadratic root 2 - sqrt(3)/2, cross-checked by
  // bisection on |y(t)| - 1.
  z.x = Vec3(-2, 0.5, 0);
  z.v = Vec3(1, 0, 0);
  t = collision_time(z);
  REQUIRE(t.has_value());
  CHECK(*t == doctest::Approx(2.0 - std::sqrt(3.0) / 2.0).epsilon(1e-14));
  double lo = 0.0, hi = *t + 0.5;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double sep = (Vec3(-2, 0.5, 0) + mid * Vec3(1, 0, 0)).norm();
    (sep > 1.0 ? lo : hi) = mid;
  }
  CHECK(*t == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-12));
}

TEST_CASE("collision time rejects overlapping data") {
  PhasePoint z;
  z.x = Vec3(0.3, 0, 0);
  z.xbar = Vec3::Zero();
  CHECK_THROWS_AS(collision_time(z), std::invalid_argument);
}

TEST_CASE("surgery: grazing contact keeps velocities bit-identical") {
  PhasePoint z;
  z.x = Vec3(0, 0, 0);
  z.xbar = Vec3(1, 0, 0);
  z.v = Vec3(0, 1, 0);
  z.vbar = Vec3(0, -1, 0);
  const HardTrajectory tr = surgery_solve(z);
  CHECK(tr.grazing);
  CHECK(tr.post_velocities == tr.pre_velocities);
  const PhasePoint later = eval_hard(tr, 3.0);
  CHECK(later.v == z.v);
  CHECK(later.vbar == z.vbar);
}

TEST_CASE("surgery: head-on example") {
  PhasePoint z;
  z.x = Vec3(0, 0, 0);
  z.xbar = Vec3(2, 0, 0);
  z.v = Vec3(1, 0, 0);
  const HardTrajectory tr = surgery_solve(z);
  REQUIRE(tr.collision_time.has_value());
  CHECK(*tr.collision_time == doctest::Approx(1.0).epsilon(1e-14));
  CHECK((tr.post_velocities.segment<3>(0)).norm() <= 1e-14);
  CHECK((tr.post_velocities.segment<3>(3) - Vec3(1, 0, 0)).norm() <= 1e-14);
}

TEST_CASE("surgery: separating datum stays linear") {
  PhasePoint z;
  z.x = Vec3(-2, 0, 0);
  z.xbar = Vec3(0, 0, 0);
  z.v = Vec3(-1, 0.2, 0);
  const HardTrajectory tr = surgery_solve(z);
  CHECK_FALSE(tr.collision_time.has_value());
  const PhasePoint zt = eval_hard(tr, 2.5);
  CHECK((zt.x - (z.x + 2.5 * z.v)).norm() <= 1e-15);
}

TEST_CASE("eval_hard: left limit at the collision time") {
  PhasePoint z;
  z.x = Vec3(0, 0, 0);
  z.xbar = Vec3(2, 0, 0);
  z.v = Vec3(1, 0, 0);
  const HardTrajectory tr = surgery_solve(z);
  const double tau = *tr.collision_time;
  CHECK(eval_hard(tr, tau).v == z.v);                    // left-closed branch
  CHECK(eval_hard(tr, tau + 1e-12).v.norm() <= 1e-14);   // post branch
  // Positions flow with the post velocities after tau.
  const PhasePoint after = eval_hard(tr, tau + 0.5);
  CHECK((after.xbar - Vec3(2 + 0.5, 0, 0)).norm() <= 1e-14);
}

TEST_CASE("surgery output never penetrates and conserves invariants") {
  std::mt19937_64 rng(229);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    // Random contact datum with inward relative velocity.
    const Vec3 n = random_unit(rng);
    PhasePoint z;
    z.x = Vec3(u(rng), u(rng), u(rng));
    z.xbar = z.x + n;
    z.v = Vec3(u(rng), u(rng), u(rng));
    z.vbar = Vec3(u(rng), u(rng), u(rng));
    if ((z.x - z.xbar).dot(z.v - z.vbar) > 0) std::swap(z.v, z.vbar);

    const HardTrajectory tr = surgery_solve(z);
    const Vec3 lm0 = linear_momentum(z);
    const Vec3 am0 = angular_momentum(z, Vec3(0.2, -0.1, 0.4));
    const double ke0 = kinetic_energy(z);
    double min_sep = 10.0;
    for (int i = 0; i <= 1000; ++i) {
      const double t = -1.0 + 3.0 * i / 1000.0;
      const PhasePoint zt = eval_hard(tr, t);
      min_sep = std::min(min_sep, (zt.x - zt.xbar).norm());
      CHECK((linear_momentum(zt) - lm0).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((angular_momentum(zt, Vec3(0.2, -0.1, 0.4)) - am0)
                .cwiseAbs()
                .maxCoeff() <= 1e-12);
      CHECK(std::abs(kinetic_energy(zt) - ke0) <= 1e-12);
    }
    CHECK(min_sep >= 1.0 - 1e-12);
  }
}

TEST_CASE("quasi-reflection: unit mass and inertia reduce to a reflection") {
  std::mt19937_64 rng(233);
  MassInertia mi;  // m = 1, J = I
  std::normal_distribution<double> g(0.0, 1.0);
  Vec12 nu;
  for (int i = 0; i < 12; ++i) nu[i] = g(rng);
  nu.normalize();
  const Mat12 sigma = quasi_reflection(mi, nu);
  const Mat12 expected = Mat12::Identity() - 2.0 * (nu * nu.transpose());
  CHECK((sigma - expected).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("quasi-reflection: involution and M-norm preservation") {
  std::mt19937_64 rng(239);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    MassInertia mi;
    mi.m = 1.0 + std::abs(g(rng));
    mi.J = random_spd(rng);
    Vec12 nu;
    for (int i = 0; i < 12; ++i) nu[i] = g(rng);
    nu.normalize();
    const Mat12 sigma = quasi_reflection(mi, nu);
    CHECK((sigma * sigma - Mat12::Identity()).cwiseAbs().maxCoeff() <= 1e-12);

    const Mat12 M = mi.block();
    Vec12 v;
    for (int i = 0; i < 12; ++i) v[i] = g(rng);
    const double before = (M * v).squaredNorm();
    const double after = (M * sigma * v).squaredNorm();
    CHECK(std::abs(after - before) / before <= 1e-10);
  }
}

TEST_CASE("quasi-reflection rejects bad inputs") {
  MassInertia mi;
  Vec12 nu = Vec12::Zero();
  nu[0] = 1.0;
  mi.J = -Mat3::Identity();
  CHECK_THROWS_AS(quasi_reflection(mi, nu), std::invalid_argument);
  mi.J = Mat3::Identity();
  nu[1] = 0.5;
  CHECK_THROWS_AS(quasi_reflection(mi, nu), std::invalid_argument);
}
