#include "spherelab/scattering.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "spherelab/geometry.hpp"
#include "spherelab/hard.hpp"
#include "spherelab/numerics.hpp"
#include "spherelab/soft.hpp"

namespace spherelab {

namespace {

constexpr double kDegenerateA0 = 1e-18;  // relative to 2 E0

double g_of(double r, const CollisionInvariants& inv,
            const HardenedPotential& pot) {
  return 2.0 * inv.E0 - inv.A0 / (r * r) - 4.0 * pot.value(r);
}

double g_prime_of(double r, const CollisionInvariants& inv,
                  const HardenedPotential& pot) {
  return 2.0 * inv.A0 / (r * r * r) - 4.0 * pot.slope(r);
}

// Phi_eps(a) - Phi_eps(b) for a < b. Near the closest approach the direct
// difference cancels catastrophically, so small gaps integrate the slope with
// a 3-point Gauss rule instead.
double potential_drop(double a, double b, const HardenedPotential& pot) {
  const double d = b - a;
  if (d < 0.05 * std::min(1.0 - a, a)) {
    constexpr double x1 = 0.11270166537925831;
    constexpr double x2 = 0.5;
    constexpr double x3 = 0.88729833462074169;
    constexpr double w1 = 5.0 / 18.0;
    constexpr double w2 = 8.0 / 18.0;
    const double s = w1 * pot.slope(a + x1 * d) + w2 * pot.slope(a + x2 * d) +
                     w1 * pot.slope(a + x3 * d);
    return -d * s;
  }
  return pot.value(a) - pot.value(b);
}

struct DesingularizedRadicand {
  double rho;  // closest approach
  const CollisionInvariants& inv;
  const HardenedPotential& pot;

  // g(r(u)) evaluated in the cancellation-free form
  // g(r) - g(rho) = A0 (r - rho)(r + rho)/(rho^2 r^2) + 4 [Phi(rho) - Phi(r)]
  // with r - rho = (1 - rho) u^2 carried as an exact product.
  double operator()(double u) const {
    const double delta = (1.0 - rho) * u * u;
    const double r = rho + delta;
    const double ang = inv.A0 * delta * (r + rho) / (rho * rho * r * r);
    return ang + 4.0 * potential_drop(rho, r, pot);
  }
};

// Canonical contact datum in the plane with the given invariants: |y0| = 1,
// radial speed sqrt(2E0 - A0) inward, tangential speed sqrt(A0).
void canonical_contact(const CollisionInvariants& inv, Vec3* y0, Vec3* w0) {
  const double radial = std::sqrt(std::max(2.0 * inv.E0 - inv.A0, 0.0));
  const double tangential = std::sqrt(std::max(inv.A0, 0.0));
  *y0 = Vec3(1.0, 0.0, 0.0);
  *w0 = Vec3(-radial, tangential, 0.0);
}

// Time of the minimum of |y(t)| from the reduced ODE; used when g'(rho*) is
// too small for the quadrature to be trustworthy.
double tau_star_from_ode(const CollisionInvariants& inv,
                         const HardenedPotential& pot, double rho_est) {
  Vec3 y0, w0;
  canonical_contact(inv, &y0, &w0);
  ReducedState r;
  r.y = y0;
  r.w = w0;
  // The boundary layer of width 1 - rho* is crossed at the contact speed, so
  // scale the horizon with that traversal time.
  const double radial = std::sqrt(std::max(2.0 * inv.E0 - inv.A0, 1e-300));
  const double horizon = std::max(1.0, 20.0 * (1.0 - rho_est) / radial);
  SoftProblem p{pot, from_reduced(r), 0.0, horizon, 1e-10, 1e-12};
  // Expand the horizon until the pair separates again.
  for (int attempt = 0; attempt < 8; ++attempt) {
    const ReducedTrajectory tr = integrate_reduced(p);
    const Vec3 yT = tr.y(p.t1);
    const Vec3 wT = tr.w(p.t1);
    if (yT.norm() > 1.0 && yT.dot(wT) > 0.0) {
      auto radial_speed = [&](double t) { return tr.y(t).dot(tr.w(t)); };
      return num::bisect(radial_speed, p.t0, p.t1, 1e-13, 100);
    }
    p.t1 *= 2.0;
  }
  throw std::runtime_error("tau_star: reduced trajectory never separates");
}

struct RootInfo {
  double rho;
  double g_prime;
};

RootInfo locate_rho_star(const CollisionInvariants& inv,
                         const HardenedPotential& pot) {
  if (!(inv.E0 > 0.0))
    throw std::invalid_argument("rho_star: zero relative velocity");
  const double contact_sq = 2.0 * inv.E0 - inv.A0;
  if (!(contact_sq > 0.0))
    throw std::invalid_argument(
        "rho_star: datum is not transversally collisional (2E0 <= A0)");

  // Radial motion: 4 Phi_eps(rho*) = 2 E0 exactly.
  if (inv.A0 <= kDegenerateA0 * 2.0 * inv.E0) {
    const double rho =
        inverse_on_support(pot.base, pot.epsilon * inv.E0 / 2.0);
    return {rho, g_prime_of(rho, inv, pot)};
  }

  // The radial root for A0 = 0, nudged inward, brackets the true root from
  // below: g there is dominated by -A0/rho^2.
  const double lo = inverse_on_support(
      pot.base, pot.epsilon * inv.E0 / 2.0 * (1.0 + 1e-8));
  auto g = [&](double r) { return g_of(r, inv, pot); };
  if (!(g(lo) < 0.0) || !(g(1.0) > 0.0))
    throw std::invalid_argument(
        "rho_star: no sign change in bracket (datum not collisional at this "
        "eps)");
  const double rho = num::bisect(g, lo, 1.0, 1e-15, 120);
  return {rho, g_prime_of(rho, inv, pot)};
}

bool is_grazing(const CollisionInvariants& inv) {
  return 2.0 * inv.E0 - inv.A0 <= 1e-14 * 2.0 * inv.E0;
}

void require_precollisional(const PhasePoint& z0) {
  const Vec3 y0 = z0.x - z0.xbar;
  const Vec3 w0 = z0.v - z0.vbar;
  if (std::abs(y0.norm() - 1.0) > kGeomTol)
    throw std::invalid_argument("datum must lie on the contact sphere |y| = 1");
  if (y0.dot(w0) > kGeomTol)
    throw std::invalid_argument("datum must be pre-collisional (y0.w0 <= 0)");
}

}  // namespace

PolarFrame PolarFrame::build(const Vec3& y0, const Vec3& w0) {
  PolarFrame f;
  const Vec3 ell = y0.cross(w0);
  Vec3 axis;
  if (ell.norm() > 1e-14 * y0.norm() * w0.norm()) {
    axis = ell.normalized();
  } else {
    // Radial motion: the plane normal is any direction orthogonal to y0.
    const Vec3 yhat = y0.normalized();
    int k = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(yhat[i]) < std::abs(yhat[k])) k = i;
    axis = yhat.cross(Vec3::Unit(k)).normalized();
  }
  // Orthonormal right-handed triple with the plane normal as third column;
  // the in-plane gauge is free and cancels in the apse and in theta* - theta0.
  int k = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(axis[i]) < std::abs(axis[k])) k = i;
  const Vec3 u = axis.cross(Vec3::Unit(k)).normalized();
  const Vec3 v = axis.cross(u);
  f.R0.col(0) = u;
  f.R0.col(1) = v;
  f.R0.col(2) = axis;
  const Vec3 p = f.R0.transpose() * y0;
  f.rho0 = std::hypot(p.x(), p.y());
  f.theta0 = std::atan2(p.x(), p.y());  // e(theta) = (sin, cos)
  return f;
}

double rho_star(const CollisionInvariants& inv, const HardenedPotential& pot) {
  return locate_rho_star(inv, pot).rho;
}

RadialAnalysis radial_analysis(const CollisionInvariants& inv,
                               const HardenedPotential& pot, double quad_tol) {
  RadialAnalysis out;
  if (is_grazing(inv)) {
    out.grazing = true;
    out.rho_star = 1.0;
    return out;
  }
  const RootInfo root = locate_rho_star(inv, pot);
  out.rho_star = root.rho;
  out.g_prime = root.g_prime;

  if (root.g_prime < 1e-12) {
    // Near-grazing: the desingularized quadrature loses its linear radicand;
    // fall back to the reduced ODE for the time of closest approach.
    out.ode_fallback = true;
    out.tau_star = tau_star_from_ode(inv, pot, root.rho);
    out.tau_error = 1e-8;
    out.delta_theta = std::sqrt(inv.A0) * out.tau_star;
    out.theta_error = 1e-6;
    return out;
  }

  const double rho = root.rho;
  const double one_minus = 1.0 - rho;
  DesingularizedRadicand g{rho, inv, pot};
  const double limit0 = 2.0 * std::sqrt(one_minus / root.g_prime);

  auto time_integrand = [&](double u) -> double {
    if (u < 1e-8) return limit0;
    return 2.0 * one_minus * u / std::sqrt(g(u));
  };
  const num::QuadResult tau = num::adaptive_simpson(time_integrand, 0.0, 1.0,
                                                    quad_tol);
  out.tau_star = tau.value;
  out.tau_error = tau.error;

  if (inv.A0 > kDegenerateA0 * 2.0 * inv.E0) {
    const double sqrtA0 = std::sqrt(inv.A0);
    auto angle_integrand = [&](double u) -> double {
      if (u < 1e-8) return limit0 * sqrtA0 / (rho * rho);
      const double r = rho + one_minus * u * u;
      return 2.0 * one_minus * u * sqrtA0 / (r * r * std::sqrt(g(u)));
    };
    const num::QuadResult th =
        num::adaptive_simpson(angle_integrand, 0.0, 1.0, quad_tol);
    out.delta_theta = th.value;
    out.theta_error = th.error;
  }
  return out;
}

double tau_star(const CollisionInvariants& inv, const HardenedPotential& pot,
                double quad_tol) {
  return radial_analysis(inv, pot, quad_tol).tau_star;
}

double deflection_angle(const PhasePoint& z0, const HardenedPotential& pot,
                        double quad_tol) {
  const ReducedState r = to_reduced(z0);
  const CollisionInvariants inv = collision_invariants(r);
  if (inv.A0 <= kDegenerateA0 * 2.0 * inv.E0)
    throw std::invalid_argument(
        "deflection_angle: degenerate frame (A0 = 0), use the radial branch");
  require_precollisional(z0);
  const PolarFrame frame = PolarFrame::build(r.y, r.w);
  const RadialAnalysis ra = radial_analysis(inv, pot, quad_tol);
  return frame.theta0 - ra.delta_theta;
}

Vec3 apse_line(const PhasePoint& z0, const HardenedPotential& pot,
               double quad_tol) {
  require_precollisional(z0);
  const ReducedState r = to_reduced(z0);
  const CollisionInvariants inv = collision_invariants(r);
  const PolarFrame frame = PolarFrame::build(r.y, r.w);
  if (inv.A0 <= kDegenerateA0 * 2.0 * inv.E0 || is_grazing(inv))
    return frame.in_plane(frame.theta0);
  const RadialAnalysis ra = radial_analysis(inv, pot, quad_tol);
  return frame.in_plane(frame.theta0 - ra.delta_theta);
}

CollisionAnalysis analyze_collision(const PhasePoint& z0,
                                    const HardenedPotential& pot,
                                    double quad_tol) {
  require_precollisional(z0);
  const ReducedState r = to_reduced(z0);
  const CollisionInvariants inv = collision_invariants(r);
  const PolarFrame frame = PolarFrame::build(r.y, r.w);

  CollisionAnalysis out;
  out.epsilon = pot.epsilon;
  out.invariants_in = inv;
  const RadialAnalysis ra = radial_analysis(inv, pot, quad_tol);
  out.rho_star = ra.rho_star;
  out.tau_star = ra.tau_star;
  out.theta_star = frame.theta0 - ra.delta_theta;
  out.apse = frame.in_plane(out.theta_star);
  return out;
}

SoftScatteringResult soft_scatter(const PhasePoint& z0,
                                  const HardenedPotential& pot,
                                  double quad_tol) {
  SoftScatteringResult res;
  res.pre = z0;
  res.analysis = analyze_collision(z0, pot, quad_tol);
  const Vec3& omega = res.analysis.apse;
  res.nu_hat_star << omega, -omega;
  res.nu_hat_star /= std::sqrt(2.0);

  const Vec3 y0 = z0.x - z0.xbar;
  const Vec3 drift = res.analysis.tau_star * (z0.v + z0.vbar);
  const Vec3 reflected = omega.dot(y0) * omega;
  res.post.x = z0.xbar + reflected + drift;
  res.post.xbar = z0.x - reflected + drift;

  const Vec6 vpre = z0.velocities();
  const Vec6 vpost =
      vpre - 2.0 * res.nu_hat_star.dot(vpre) * res.nu_hat_star;
  res.post.v = vpost.segment<3>(0);
  res.post.vbar = vpost.segment<3>(3);
  return res;
}

SweepTable hardening_sweep(const PhasePoint& z0, const ReferencePotential& base,
                           const std::vector<double>& eps_grid,
                           const SweepOptions& opt) {
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (!(eps_grid[i] > 0.0) || !(eps_grid[i] < 1.0))
      throw std::invalid_argument("hardening_sweep: eps values must lie in (0,1)");
    if (i > 0 && !(eps_grid[i] < eps_grid[i - 1]))
      throw std::invalid_argument(
          "hardening_sweep: eps grid must be strictly decreasing");
  }
  require_precollisional(z0);

  // Hard-sphere reference velocities.
  const Vec3 n = (z0.xbar - z0.x).normalized();
  const Vec6 hard_post = boltzmann_matrix(n).apply(z0.velocities());

  SweepTable table;
  table.rows.resize(eps_grid.size());

  auto run_row = [&](std::size_t i) {
    SweepRow& row = table.rows[i];
    row.eps = eps_grid[i];
    try {
      const HardenedPotential pot(base, eps_grid[i]);
      const SoftScatteringResult sc = soft_scatter(z0, pot, opt.quad_tol);
      row.rho_star = sc.analysis.rho_star;
      row.tau_star = sc.analysis.tau_star;
      row.theta_star = sc.analysis.theta_star;
      row.apse = sc.analysis.apse;
      row.scatter_err = (sc.post.velocities() - hard_post).norm();
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.note = e.what();
    }
  };

  const int threads = std::max(1, opt.threads);
  if (threads == 1 || eps_grid.size() < 2) {
    for (std::size_t i = 0; i < eps_grid.size(); ++i) run_row(i);
  } else {
    std::vector<std::thread> pool;
    const std::size_t n_rows = eps_grid.size();
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t]() {
        for (std::size_t i = static_cast<std::size_t>(t); i < n_rows;
             i += static_cast<std::size_t>(threads))
          run_row(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  // Rate fit on the asymptotic tail (the largest-eps rows are dropped).
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const SweepRow& row = table.rows[i];
    if (i < static_cast<std::size_t>(opt.fit_skip)) continue;
    if (!row.ok || !(row.tau_star > 0.0)) continue;
    lx.push_back(std::log(row.eps));
    ly.push_back(std::log(row.tau_star));
  }
  table.summary.fit_skip = opt.fit_skip;
  table.summary.beta_inverse = 1.0 / base.beta();
  if (lx.size() >= 2) {
    const num::LineFit fit = num::fit_line(lx, ly);
    table.summary.slope = fit.slope;
    table.summary.slope_stderr = fit.slope_stderr;
  }
  return table;
}

}  // namespace spherelab
