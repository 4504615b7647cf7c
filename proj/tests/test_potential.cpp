#include <doctest.h>

#include <cmath>
#include <random>

#include "spherelab/potential.hpp"

using namespace spherelab;

TEST_CASE("standard family: construction guards") {
  CHECK_THROWS_AS(standard_family(-1.0, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(standard_family(0.0, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(standard_family(1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(standard_family(1.0, 1.5), std::invalid_argument);
  CHECK_NOTHROW(standard_family(1.0, 2.5));
}

TEST_CASE("standard family: point values") {
  const ReferencePotential p = standard_family(1.0, 3.0);
  CHECK(p.value(0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(p.value(1.0) == 0.0);
  CHECK(p.value(2.0) == 0.0);
  // Hand-differentiated slope at r = 1/2.
  CHECK(p.slope(0.5) == doctest::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("slope matches central finite differences") {
  const ReferencePotential p = standard_family(1.0, 3.0);
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.01, 0.999);
  const double h = 1e-6;
  for (int trial = 0; trial < 1000; ++trial) {
    const double r = u(rng);
    const double fd = (p.value(r + h) - p.value(r - h)) / (2 * h);
    CHECK(p.slope(r) ==
          doctest::Approx(fd).epsilon(1e-6).scale(std::abs(p.slope(r))));
  }
}

TEST_CASE("inverse on support") {
  const ReferencePotential p = standard_family(1.0, 3.0);
  CHECK(inverse_on_support(p, 0.25) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK_THROWS_AS(inverse_on_support(p, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(inverse_on_support(p, -1.0), std::invalid_argument);

  // Monotone decreasing in the value.
  const double r_hi = inverse_on_support(p, 1e-3);
  const double r_lo = inverse_on_support(p, 1e3);
  CHECK(r_hi > r_lo);

  // Independent bisection oracle for r^-1 (1-r)^3 = 1e-3.
  double lo = 1e-9, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::pow(mid, -1.0) * std::pow(1.0 - mid, 3.0) > 1e-3 ? lo : hi) = mid;
  }
  CHECK(r_hi == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-12));
}

TEST_CASE("inverse_on_support composed with eval is the identity") {
  const ReferencePotential p = standard_family(1.5, 2.5);
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 200; ++trial) {
    const double r = u(rng);
    CHECK(inverse_on_support(p, p.value(r)) ==
          doctest::Approx(r).epsilon(1e-12));
  }
}

TEST_CASE("hardened potential scales exactly on the dyadic grid") {
  const ReferencePotential base = standard_family(1.0, 3.0);
  for (int k = 1; k <= 40; k += 3) {
    const HardenedPotential pot(base, std::ldexp(1.0, -k));
    for (double r : {0.3, 0.55, 0.9, 0.99}) {
      CHECK(pot.value(r) * pot.epsilon == base.value(r));
    }
  }
  CHECK_THROWS_AS(HardenedPotential(base, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(HardenedPotential(base, 0.0), std::invalid_argument);
}

TEST_CASE("validate_hypotheses certifies the standard family") {
  ReferencePotential p = standard_family(1.0, 3.0);
  const ValidationReport rep = validate_hypotheses(p, 2000);
  CHECK(rep.passed);
  REQUIRE(p.certified().has_value());
  const HypothesisConstants& c = *p.certified();
  // On [1/2, 1) the ratio Phi0 / (1-r)^3 equals 1/r, so c1 ~ 1 and c2 = 2.
  CHECK(c.c1 == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(c.c2 == doctest::Approx(2.0).epsilon(1e-6));
  // |Phi0'| / (1-r)^2 = (1 + 2r) / r^2 ranges from 3 (r=1) to 8 (r=1/2).
  CHECK(c.kappa1 == doctest::Approx(3.0).epsilon(1e-2));
  CHECK(c.kappa2 == doctest::Approx(8.0).epsilon(1e-6));
  CHECK(0.0 < c.c1);
  CHECK(c.c1 <= c.c2);
  CHECK(0.0 < c.kappa1);
  CHECK(c.kappa1 <= c.kappa2);
}

TEST_CASE("validate_hypotheses accepts beta = 2.5") {
  ReferencePotential p = standard_family(1.0, 2.5);
  const ValidationReport rep = validate_hypotheses(p, 1000);
  CHECK(rep.passed);
  CHECK(rep.constants.c1 > 0.0);
}

TEST_CASE("validate_hypotheses rejects a non-monotone potential") {
  // A bump that increases on part of (0,1).
  ReferencePotential bad(
      [](double r) { return r >= 1.0 ? 0.0 : 1.0 + std::sin(6.0 * r) / r; },
      [](double r) {
        return r >= 1.0 ? 0.0
                        : (6.0 * std::cos(6.0 * r) * r - std::sin(6.0 * r)) /
                              (r * r);
      },
      1.0, 3.0);
  const ValidationReport rep = validate_hypotheses(bad, 500);
  CHECK_FALSE(rep.passed);
  CHECK_FALSE(rep.failure.empty());
}

TEST_CASE("validate_hypotheses requires grid_size >= 100") {
  ReferencePotential p = standard_family(1.0, 3.0);
  CHECK_THROWS_AS(validate_hypotheses(p, 50), std::invalid_argument);
}
