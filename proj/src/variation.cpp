#include "spherelab/variation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "spherelab/geometry.hpp"
#include "spherelab/hard.hpp"
#include "spherelab/numerics.hpp"
#include "spherelab/soft.hpp"

namespace spherelab {

namespace {

// Soft velocity path on (t0, t1) for a contact datum given at time zero:
// exact free flight before t0 <= 0, dense integration beyond.
struct SoftVelocityPath {
  std::shared_ptr<SampledTrajectory> traj;
  Path6 path;
  double tau_plus = 0.0;
  bool contact = false;
};

SoftVelocityPath make_soft_path(const PhasePoint& z0,
                                const ReferencePotential& base, double eps,
                                double t0, double t1) {
  if (t0 > 0.0)
    throw std::invalid_argument("velocity path: interval must start at or "
                                "before the contact datum time 0");
  // The datum is prolonged by exact free flight back to t0; that requires the
  // backward segment to stay outside the support. The minimum separation of
  // the segment sits at an endpoint or at the vertex of the quadratic.
  const Vec3 y0 = z0.x - z0.xbar;
  const Vec3 w0 = z0.v - z0.vbar;
  double min_sq = std::min((y0 + t0 * w0).squaredNorm(), y0.squaredNorm());
  if (w0.squaredNorm() > 0.0) {
    const double t_vertex = -y0.dot(w0) / w0.squaredNorm();
    if (t_vertex > t0 && t_vertex < 0.0)
      min_sq = std::min(min_sq, (y0 + t_vertex * w0).squaredNorm());
  }
  if (min_sq < 1.0 - 1e-12)
    throw std::invalid_argument(
        "velocity path: datum is not pre-collisional over [t0, 0]");
  HardenedPotential pot(base, eps);
  SoftProblem p{pot, free_flight(z0, t0), t0, t1, 1e-10, 1e-12};
  SoftVelocityPath out;
  out.traj = std::make_shared<SampledTrajectory>(integrate(p));
  const ContactWindow win = detect_contact_window(*out.traj);
  out.contact = !win.none_flag;
  out.tau_plus = win.none_flag ? 0.0 : win.tau_plus;
  auto traj = out.traj;
  out.path = [traj](double t) { return traj->velocities(t); };
  return out;
}

// Hard-sphere velocity path: piecewise constant, left-closed at the jump.
Path6 make_hard_path(const HardTrajectory& tr) {
  const Vec6 pre = tr.pre_velocities;
  const Vec6 post = tr.post_velocities;
  const bool jumps = tr.collision_time.has_value() && !tr.grazing;
  const double tau = jumps ? *tr.collision_time : 0.0;
  return [pre, post, jumps, tau](double t) { return (jumps && t > tau) ? post : pre; };
}

}  // namespace

Partition Partition::uniform(double t0, double t1, std::size_t n) {
  if (!(t0 < t1)) throw std::invalid_argument("Partition: empty interval");
  if (n < 2) throw std::invalid_argument("Partition: need at least two points");
  Partition part;
  part.points.reserve(n);
  const double h = (t1 - t0) / static_cast<double>(n + 1);
  for (std::size_t j = 1; j <= n; ++j)
    part.points.push_back(t0 + h * static_cast<double>(j));
  return part;
}

double pointwise_variation(const Path6& u, const Partition& part) {
  if (part.points.size() < 2)
    throw std::invalid_argument("pointwise_variation: need >= 2 points");
  double sum = 0.0;
  Vec6 prev = u(part.points.front());
  for (std::size_t j = 1; j < part.points.size(); ++j) {
    if (!(part.points[j] > part.points[j - 1]))
      throw std::invalid_argument("pointwise_variation: partition not increasing");
    const Vec6 cur = u(part.points[j]);
    sum += (cur - prev).norm();
    prev = cur;
  }
  return sum;
}

VariationReport variation_refined(const Path6& u, double t0, double t1) {
  VariationReport rep;
  std::size_t n = 64;
  double prev = pointwise_variation(u, Partition::uniform(t0, t1, n));
  int quiet = 0;
  while (n <= (1u << 20)) {
    n *= 2;
    const double cur = pointwise_variation(u, Partition::uniform(t0, t1, n));
    const double change = std::abs(cur - prev) / std::max(cur, 1e-300);
    prev = cur;
    if (change < 1e-8 && n >= (1u << 10)) {
      // Two consecutive quiet refinements guard against a narrow feature
      // hiding inside a single panel.
      if (++quiet >= 2) {
        rep.converged = true;
        break;
      }
    } else {
      quiet = 0;
    }
  }
  rep.p_var = prev;
  rep.final_points = n;
  rep.l1_norm =
      num::adaptive_simpson([&](double t) { return u(t).norm(); }, t0, t1, 1e-9)
          .value;
  rep.bv_norm = rep.l1_norm + rep.p_var;
  return rep;
}

double l1_distance(const Path6& u, const Path6& w, double t0, double t1,
                   const std::vector<double>& breakpoints, double abs_tol) {
  std::vector<double> cuts{t0, t1};
  for (double b : breakpoints)
    if (b > t0 && b < t1) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0;
  const double tol_per = abs_tol / static_cast<double>(cuts.size() - 1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += num::adaptive_simpson(
                 [&](double t) { return (u(t) - w(t)).norm(); }, cuts[i],
                 cuts[i + 1], tol_per)
                 .value;
  }
  return total;
}

BoundReport uniform_bound_check(const PhasePoint& z0,
                                const ReferencePotential& base,
                                const std::vector<double>& eps_grid, double t0,
                                double t1) {
  BoundReport rep;
  const HardTrajectory hard = surgery_solve(z0);
  rep.var_hard = (hard.post_velocities - hard.pre_velocities).norm();

  for (double eps : eps_grid) {
    VariationRow row;
    row.eps = eps;
    try {
      const SoftVelocityPath soft = make_soft_path(z0, base, eps, t0, t1);
      const VariationReport vr = variation_refined(soft.path, t0, t1);
      row.p_var = vr.p_var;
      row.converged = vr.converged;
      row.ok = true;
    } catch (const std::exception& e) {
      row.note = e.what();
    }
    rep.rows.push_back(row);
  }

  double largest_eps_var = 0.0;
  bool first = true;
  for (const auto& row : rep.rows) {
    if (!row.ok) continue;
    if (first) {
      largest_eps_var = row.p_var;
      first = false;
    }
    rep.var_max = std::max(rep.var_max, row.p_var);
  }
  rep.ratio_max = rep.var_hard > 0.0 ? rep.var_max / rep.var_hard : 0.0;
  rep.uniform_ok =
      !first && rep.var_max <= 1.5 * largest_eps_var + rep.var_hard + 1e-12;
  return rep;
}

ConvergenceReport weak_star_report(const PhasePoint& z0,
                                   const ReferencePotential& base,
                                   const std::vector<double>& eps_grid,
                                   double t0, double t1) {
  ConvergenceReport rep;
  const HardTrajectory hard = surgery_solve(z0);
  const Path6 hard_path = make_hard_path(hard);
  rep.bound.var_hard = (hard.post_velocities - hard.pre_velocities).norm();

  const double hard_tau = hard.collision_time.value_or(0.0);

  double max_resid = 0.0;
  for (double eps : eps_grid) {
    ConvergenceRow row;
    VariationRow vrow;
    row.eps = vrow.eps = eps;
    try {
      const SoftVelocityPath soft = make_soft_path(z0, base, eps, t0, t1);
      const VariationReport vr = variation_refined(soft.path, t0, t1);
      vrow.p_var = vr.p_var;
      vrow.converged = vr.converged;
      vrow.ok = true;
      row.p_var = vr.p_var;

      std::vector<double> cuts{hard_tau};
      if (soft.contact) cuts.push_back(soft.tau_plus);
      row.l1_dist = l1_distance(soft.path, hard_path, t0, t1, cuts);
      row.ok = true;

      // Linear-momentum residual of the soft run over its accepted steps.
      const Vec3 lm0 = linear_momentum(z0);
      const auto& times = soft.traj->times();
      const std::size_t stride = std::max<std::size_t>(1, times.size() / 128);
      for (std::size_t i = 0; i < times.size(); i += stride) {
        const PhasePoint zt = soft.traj->state(times[i]);
        max_resid = std::max(
            max_resid, (linear_momentum(zt) - lm0).cwiseAbs().maxCoeff());
      }
    } catch (const std::exception& e) {
      row.note = vrow.note = e.what();
    }
    rep.rows.push_back(row);
    rep.bound.rows.push_back(vrow);
  }

  // Conservation residuals and non-penetration of the limit candidate.
  const Vec3 lm0 = linear_momentum(z0);
  const Vec3 am0 = angular_momentum(z0, Vec3::Zero());
  const double ke0 = kinetic_energy(z0);
  rep.min_separation_hard = std::numeric_limits<double>::infinity();
  const int samples = 10000;
  for (int i = 0; i <= samples; ++i) {
    const double t = t0 + (t1 - t0) * static_cast<double>(i) / samples;
    const PhasePoint zt = eval_hard(hard, t);
    rep.min_separation_hard =
        std::min(rep.min_separation_hard, (zt.x - zt.xbar).norm());
    max_resid = std::max(
        max_resid, (linear_momentum(zt) - lm0).cwiseAbs().maxCoeff());
    max_resid = std::max(
        max_resid,
        (angular_momentum(zt, Vec3::Zero()) - am0).cwiseAbs().maxCoeff());
    max_resid = std::max(max_resid, std::abs(kinetic_energy(zt) - ke0));
  }
  rep.conservation_max_residual = max_resid;

  // Bound-report summary fields.
  double largest_eps_var = 0.0;
  bool first = true;
  for (const auto& row : rep.bound.rows) {
    if (!row.ok) continue;
    if (first) {
      largest_eps_var = row.p_var;
      first = false;
    }
    rep.bound.var_max = std::max(rep.bound.var_max, row.p_var);
  }
  rep.bound.ratio_max =
      rep.bound.var_hard > 0.0 ? rep.bound.var_max / rep.bound.var_hard : 0.0;
  rep.bound.uniform_ok = !first && rep.bound.var_max <=
                                       1.5 * largest_eps_var +
                                           rep.bound.var_hard + 1e-12;

  // L1 rate fit and monotonicity.
  std::vector<double> lx, ly;
  rep.l1_decreasing = true;
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& row : rep.rows) {
    if (!row.ok) continue;
    if (!(row.l1_dist < prev)) rep.l1_decreasing = false;
    prev = row.l1_dist;
    if (row.l1_dist > 0.0) {
      lx.push_back(std::log(row.eps));
      ly.push_back(std::log(row.l1_dist));
    }
  }
  if (lx.size() >= 2) {
    const num::LineFit fit = num::fit_line(lx, ly);
    rep.l1_slope = fit.slope;
    rep.l1_slope_stderr = fit.slope_stderr;
  }
  return rep;
}

}  // namespace spherelab
