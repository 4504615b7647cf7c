#include <doctest.h>

#include <cmath>

#include "spherelab/config.hpp"
#include "spherelab/geometry.hpp"
#include "spherelab/hard.hpp"
#include "spherelab/numerics.hpp"
#include "spherelab/scattering.hpp"
#include "spherelab/soft.hpp"
#include "spherelab/variation.hpp"

using namespace spherelab;

namespace {

Vec6 constant6(double c) {
  Vec6 v;
  v.setConstant(c);
  return v;
}

}  // namespace

TEST_CASE("pointwise variation: constants, jumps, ramps") {
  const Partition part = Partition::uniform(0.0, 1.0, 64);

  CHECK(pointwise_variation([](double) { return constant6(0.7); }, part) ==
        0.0);

  // A single jump of height h counted once by any straddling partition.
  const double h = 0.37;
  auto jump = [h](double t) { return t < 0.5 ? constant6(0.0) : Vec6::Unit(2) * h; };
  CHECK(pointwise_variation(jump, part) == doctest::Approx(h).epsilon(1e-15));
  Partition two;
  two.points = {0.25, 0.75};
  CHECK(pointwise_variation(jump, two) == doctest::Approx(h).epsilon(1e-15));

  // Monotone scalar ramp from 0 to 1: variation 1 at every refinement, up to
  // the unsampled tails of the open interval.
  auto ramp = [](double t) { return Vec6::Unit(0) * t; };
  for (std::size_t n : {16u, 256u, 4096u}) {
    const Partition p = Partition::uniform(0.0, 1.0, n);
    CHECK(pointwise_variation(ramp, p) ==
          doctest::Approx(1.0).epsilon(2.0 / n));
  }
}

TEST_CASE("hard-sphere limit velocities: variation equals the jump size") {
  const PhasePoint z0 = preset_datum(Preset::HeadOn);
  const HardTrajectory hard = surgery_solve(z0);
  const Vec6 pre = hard.pre_velocities;
  const Vec6 post = hard.post_velocities;
  auto path = [&](double t) { return t > 0.0 ? post : pre; };
  const VariationReport rep = variation_refined(path, -0.25, 1.0);
  const Vec3 n = (z0.xbar - z0.x).normalized();
  const double expected =
      std::sqrt(2.0) * std::abs((z0.v - z0.vbar).dot(n));
  CHECK(rep.p_var == doctest::Approx(expected).epsilon(1e-12));
  CHECK(rep.converged);
  CHECK(rep.bv_norm == doctest::Approx(rep.p_var + rep.l1_norm));
}

TEST_CASE("refinement monotonicity under dyadic doubling") {
  // A wiggly but smooth path.
  auto path = [](double t) {
    Vec6 v;
    v << std::sin(3 * t), std::cos(5 * t), t * t, 0.2 * t, std::sin(7 * t),
        0.0;
    return v;
  };
  double prev = 0.0;
  for (std::size_t n = 16; n <= 4096; n *= 2) {
    const double cur =
        pointwise_variation(path, Partition::uniform(-1.0, 2.0, n));
    CHECK(prev <= cur + 1e-12);
    prev = cur;
  }
}

TEST_CASE("collinear refinement points leave the variation unchanged") {
  auto path = [](double t) { return Vec6::Unit(1) * (2.0 * t + 1.0); };
  Partition coarse;
  coarse.points = {0.1, 0.4, 0.9};
  Partition fine;
  fine.points = {0.1, 0.2, 0.25, 0.4, 0.7, 0.9};  // refinement of coarse
  CHECK(pointwise_variation(path, coarse) ==
        doctest::Approx(pointwise_variation(path, fine)).epsilon(1e-14));
}

TEST_CASE("superadditivity at a junction point") {
  auto path = [](double t) {
    Vec6 v;
    v << std::sin(4 * t), std::cos(2 * t), 0, 0, 0, 0;
    return v;
  };
  const double var_left =
      pointwise_variation(path, Partition::uniform(0.0, 0.5, 512));
  const double var_right =
      pointwise_variation(path, Partition::uniform(0.5, 1.0, 512));
  const double var_full =
      pointwise_variation(path, Partition::uniform(0.0, 1.0, 1024));
  CHECK(var_left + var_right <= var_full + 1e-3);  // tails vanish with n
}

TEST_CASE("smooth variation equals the integral of the speed") {
  // Head-on run: the velocity derivative keeps a fixed direction, so the
  // pointwise variation equals sqrt(2) * int |grad Phi_eps| dt.
  const double eps = 1e-3;
  const ReferencePotential base = standard_family(1.0, 3.0);
  HardenedPotential pot(base, eps);
  const PhasePoint z0 = preset_datum(Preset::HeadOn);
  SoftProblem p{pot, z0, 0.0, 1.0, 1e-10, 1e-12};
  const SampledTrajectory tr = integrate(p);
  const ContactWindow win = detect_contact_window(tr);

  auto path = [&](double t) { return tr.velocities(t); };
  const VariationReport rep = variation_refined(path, 0.0, 1.0);

  auto force = [&](double t) {
    const double sep = tr.separation(t);
    return sep < 1.0 ? std::abs(pot.slope(sep)) : 0.0;
  };
  const double integral =
      num::adaptive_simpson(force, win.tau_minus, win.tau_plus, 1e-10).value;
  CHECK(rep.p_var ==
        doctest::Approx(std::sqrt(2.0) * integral).epsilon(1e-5));
}

TEST_CASE("l1 distance: coincidence, box, triangle inequality") {
  auto zero = [](double) { return Vec6::Zero(); };
  CHECK(l1_distance(zero, zero, 0.0, 1.0) == 0.0);

  // Unit-height box of width delta.
  const double delta = 0.125;
  auto box = [delta](double t) {
    return (t >= 0.4 && t < 0.4 + delta) ? Vec6(Vec6::Unit(0)) : Vec6(Vec6::Zero());
  };
  CHECK(l1_distance(box, zero, 0.0, 1.0, {0.4, 0.4 + delta}) ==
        doctest::Approx(delta).epsilon(1e-9));

  auto f = [](double t) { return Vec6::Unit(0) * std::sin(3 * t); };
  auto g = [](double t) { return Vec6::Unit(1) * t; };
  auto h = [](double t) { return Vec6::Unit(2) * std::cos(t); };
  const double fg = l1_distance(f, g, 0.0, 1.0);
  const double gh = l1_distance(g, h, 0.0, 1.0);
  const double fh = l1_distance(f, h, 0.0, 1.0);
  CHECK(fh <= fg + gh + 1e-9);
}

TEST_CASE("uniform bound check: grazing datum has zero variation") {
  const ReferencePotential base = standard_family(1.0, 3.0);
  const PhasePoint z0 = preset_datum(Preset::Grazing);
  std::vector<double> grid;
  for (int k = 6; k <= 10; ++k) grid.push_back(std::ldexp(1.0, -k));
  const BoundReport rep = uniform_bound_check(z0, base, grid, -0.25, 1.0);
  CHECK(rep.var_hard == 0.0);
  for (const auto& row : rep.rows) {
    REQUIRE(row.ok);
    CHECK(row.p_var <= 1e-10);
  }
  CHECK(rep.uniform_ok);
}

TEST_CASE("uniform bound check: head-on sweep brackets the hard jump") {
  const ReferencePotential base = standard_family(1.0, 3.0);
  const PhasePoint z0 = preset_datum(Preset::HeadOn);
  std::vector<double> grid;
  for (int k = 6; k <= 14; k += 2) grid.push_back(std::ldexp(1.0, -k));
  const BoundReport rep = uniform_bound_check(z0, base, grid, -0.25, 1.0);
  const Vec3 n = (z0.xbar - z0.x).normalized();
  const double jump = std::sqrt(2.0) * std::abs((z0.v - z0.vbar).dot(n));
  CHECK(rep.var_hard == doctest::Approx(jump).epsilon(1e-12));
  for (const auto& row : rep.rows) {
    REQUIRE(row.ok);
    CHECK(row.p_var >= jump - 0.01);  // lower semicontinuity side
    CHECK(row.p_var <= 3.0 * jump);   // uniform side
  }
  CHECK(rep.uniform_ok);
  CHECK(rep.var_max < std::numeric_limits<double>::infinity());
}

TEST_CASE("weak-star report: L1 decay, conservation, non-penetration") {
  const ReferencePotential base = standard_family(1.0, 3.0);
  const PhasePoint z0 = preset_datum(Preset::HeadOn);
  // Deep grid so the smallest-eps distance drops below 1e-3.
  const std::vector<double> grid{std::ldexp(1.0, -8), std::ldexp(1.0, -14),
                                 std::ldexp(1.0, -20), std::ldexp(1.0, -26),
                                 std::ldexp(1.0, -31)};
  const ConvergenceReport rep = weak_star_report(z0, base, grid, -0.25, 1.0);

  REQUIRE(rep.rows.size() == grid.size());
  for (const auto& row : rep.rows) REQUIRE(row.ok);
  CHECK(rep.l1_decreasing);
  CHECK(rep.rows.back().l1_dist < 1e-3);
  CHECK(rep.conservation_max_residual <= 1e-12);
  CHECK(rep.min_separation_hard >= 1.0 - 1e-12);

  // Lower-semicontinuity proxy at every eps.
  for (const auto& vrow : rep.bound.rows)
    CHECK(rep.bound.var_hard <= vrow.p_var + 1e-6);
}

TEST_CASE("refined variation dominates the coarsest two-point bound") {
  auto path = [](double t) {
    Vec6 v;
    v << std::sin(2 * t), std::cos(3 * t), 0.5 * t, 0, 0, 0;
    return v;
  };
  const double t0 = -0.5, t1 = 1.5;
  const VariationReport rep = variation_refined(path, t0, t1);
  Partition pair;
  pair.points = {t0 + 1e-9, t1 - 1e-9};
  CHECK(rep.p_var >= pointwise_variation(path, pair) - 1e-12);
}
