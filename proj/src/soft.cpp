#include "spherelab/soft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spherelab/geometry.hpp"
#include "spherelab/numerics.hpp"

namespace spherelab {

namespace {

Vec3 grad_potential(const Vec3& y, const HardenedPotential& pot) {
  const double r = y.norm();
  if (r >= 1.0) return Vec3::Zero();
  return (pot.slope(r) / r) * y;
}

void check_problem(const SoftProblem& p) {
  if (!(p.t0 < p.t1)) throw std::invalid_argument("SoftProblem: t0 < t1 required");
  if (!(p.rel_tol > 0.0) || p.rel_tol > 1e-4 || !(p.abs_tol > 0.0) ||
      p.abs_tol > 1e-4)
    throw std::invalid_argument("SoftProblem: tolerances must lie in (0, 1e-4]");
  if ((p.z0.x - p.z0.xbar).squaredNorm() == 0.0)
    throw std::invalid_argument("SoftProblem: coincident centres");
}

// Exact entry time of the straight line y + t w into {|y| <= 1}, or nullopt.
std::optional<double> linear_entry_time(const Vec3& y, const Vec3& w) {
  const double a = w.squaredNorm();
  const double b = y.dot(w);
  const double c = y.squaredNorm() - 1.0;
  if (a == 0.0 || b >= 0.0) return std::nullopt;
  const double disc = b * b - a * c;
  if (disc <= 0.0) return std::nullopt;
  const double q = std::sqrt(disc) - b;  // positive since b < 0
  return c / q;
}

// Generic event-aware driver. RelGeom maps the state vector to the relative
// pair (y, w) used for support bookkeeping.
template <int N, class RHS, class RelGeom>
ode::DenseSolution<N> drive(RHS&& rhs, RelGeom&& rel,
                            Eigen::Matrix<double, N, 1> y, double t0, double t1,
                            const ode::StepControl& ctl, double cap_inside,
                            std::vector<double>* times) {
  using Vec = Eigen::Matrix<double, N, 1>;
  ode::Dop853Stepper<N> st;
  ode::DenseSolution<N> sol;
  times->clear();
  times->push_back(t0);

  double t = t0;
  rhs(t, y, st.k1);
  double h = ode::initial_step<N>(rhs, t, y, st.k1, t1 - t0, ctl);
  h = std::min(h, cap_inside);

  auto support_gap = [&](const Vec& state) {
    Vec3 yr, wr;
    rel(state, yr, wr);
    return yr.squaredNorm() - 1.0;
  };

  long nsteps = 0;
  bool just_redone = false;
  // Exit tolerance strictly wider than the underflow guard below, so the
  // final sliver step can never trip it.
  while (t1 - t > 32.0 * std::numeric_limits<double>::epsilon() *
                      std::max({1.0, std::abs(t), std::abs(t1)})) {
    if (++nsteps > ctl.max_steps)
      throw std::runtime_error("integrate: step budget exhausted");
    h = std::min(h, t1 - t);

    // Event-aware limiting: outside the support motion is exactly linear, so
    // a step may extend at most to the entry time; inside, the cap resolves
    // the collision layer.
    Vec3 yr, wr;
    rel(y, yr, wr);
    const double c = yr.squaredNorm() - 1.0;
    if (c <= 1e-12) {
      h = std::min(h, cap_inside);
    } else if (auto thit = linear_entry_time(yr, wr)) {
      if (*thit <= 1e-14)
        h = std::min(h, cap_inside);
      else if (*thit < h)
        h = *thit;
    }
    if (h < 16.0 * std::numeric_limits<double>::epsilon() *
                std::max(1.0, std::abs(t)))
      throw std::runtime_error("integrate: step size underflow");

    const double err = st.try_step(rhs, t, y, h, ctl);
    if (err > 1.0) {
      h /= std::min(3.0, std::pow(err, 0.125) / ctl.safe);
      just_redone = false;
      continue;
    }

    Vec f_new;
    rhs(t + h, st.y_new(), f_new);
    ode::DenseSegment<N> seg = st.make_dense(rhs, t, y, h, f_new);

    // Outward boundary crossing inside the step: redo the step so it ends on
    // the boundary (keeps each step one-sidedly smooth and marks the exit
    // with a mesh point).
    if (!just_redone && c < -1e-12 && support_gap(st.y_new()) > 1e-12) {
      auto gap_at = [&](double s) {
        Vec3 yy, ww;
        Vec state = seg.eval(s);
        rel(state, yy, ww);
        return yy.squaredNorm() - 1.0;
      };
      const double tx = num::bisect(gap_at, t, t + h, 1e-13, 80);
      if (tx - t > 1e-13 && (t + h) - tx > 1e-13) {
        h = tx - t;
        just_redone = true;
        continue;
      }
    }

    sol.push(seg);
    y = st.y_new();
    st.k1 = f_new;
    t += h;
    times->push_back(t);
    just_redone = false;

    const double fac = std::clamp(std::pow(std::max(err, 1e-32), 0.125) / ctl.safe,
                                  1.0 / ctl.fac_max, 3.0);
    h = h / fac;
  }
  return sol;
}

double relative_drift(double value, double reference) {
  return std::abs(value - reference) / std::max(std::abs(reference), 1e-300);
}

}  // namespace

double soft_hamiltonian(const PhasePoint& z, const HardenedPotential& pot) {
  return 0.5 * (z.v.squaredNorm() + z.vbar.squaredNorm()) +
         pot.value((z.x - z.xbar).norm());
}

double reduced_hamiltonian(const Vec3& y, const Vec3& w,
                           const HardenedPotential& pot) {
  return 0.5 * w.squaredNorm() + 2.0 * pot.value(y.norm());
}

SampledTrajectory integrate(const SoftProblem& p) {
  check_problem(p);
  const HardenedPotential& pot = p.potential;
  auto rhs = [&pot](double, const Vec12& z, Vec12& dz) {
    const Vec3 y = z.segment<3>(0) - z.segment<3>(3);
    const Vec3 g = grad_potential(y, pot);
    dz.segment<3>(0) = z.segment<3>(6);
    dz.segment<3>(3) = z.segment<3>(9);
    dz.segment<3>(6) = -g;
    dz.segment<3>(9) = g;
  };
  auto rel = [](const Vec12& z, Vec3& yr, Vec3& wr) {
    yr = z.segment<3>(0) - z.segment<3>(3);
    wr = z.segment<3>(6) - z.segment<3>(9);
  };
  ode::StepControl ctl;
  ctl.rel_tol = p.rel_tol;
  ctl.abs_tol = p.abs_tol;
  const double cap = std::pow(pot.epsilon, 1.0 / pot.base.beta()) / 10.0;

  std::vector<double> times;
  ode::DenseSolution<12> sol =
      drive<12>(rhs, rel, p.z0.packed(), p.t0, p.t1, ctl, cap, &times);

  const double h0 = soft_hamiltonian(p.z0, pot);
  double drift = 0.0;
  for (double t : times) {
    const PhasePoint z = PhasePoint::from_packed(sol.eval(t));
    drift = std::max(drift, relative_drift(soft_hamiltonian(z, pot), h0));
  }
  if (drift > 1e-8)
    throw std::runtime_error("integrate: Hamiltonian drift exceeds 1e-8");
  return SampledTrajectory(std::move(sol), std::move(times), drift);
}

ReducedTrajectory integrate_reduced(const SoftProblem& p) {
  check_problem(p);
  const HardenedPotential& pot = p.potential;
  auto rhs = [&pot](double, const Vec6& u, Vec6& du) {
    const Vec3 y = u.segment<3>(0);
    du.segment<3>(0) = u.segment<3>(3);
    du.segment<3>(3) = -2.0 * grad_potential(y, pot);
  };
  auto rel = [](const Vec6& u, Vec3& yr, Vec3& wr) {
    yr = u.segment<3>(0);
    wr = u.segment<3>(3);
  };
  ode::StepControl ctl;
  ctl.rel_tol = p.rel_tol;
  ctl.abs_tol = p.abs_tol;
  const double cap = std::pow(pot.epsilon, 1.0 / pot.base.beta()) / 10.0;

  const ReducedState r0 = to_reduced(p.z0);
  Vec6 u0;
  u0 << r0.y, r0.w;

  std::vector<double> times;
  ode::DenseSolution<6> sol =
      drive<6>(rhs, rel, u0, p.t0, p.t1, ctl, cap, &times);

  const double h0 = reduced_hamiltonian(r0.y, r0.w, pot);
  double drift = 0.0;
  for (double t : times) {
    const Vec6 u = sol.eval(t);
    drift = std::max(
        drift, relative_drift(
                   reduced_hamiltonian(u.segment<3>(0), u.segment<3>(3), pot),
                   h0));
  }
  if (drift > 1e-8)
    throw std::runtime_error(
        "integrate_reduced: Hamiltonian drift exceeds 1e-8");
  return ReducedTrajectory(std::move(sol), std::move(times), drift);
}

ContactWindow detect_contact_window(const SampledTrajectory& tr) {
  const auto& times = tr.times();
  const double band = 1e-10;
  auto gap = [&](double t) {
    const double sep = tr.separation(t);
    return sep * sep - 1.0;
  };

  std::vector<double> g(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) g[i] = gap(times[i]);

  if (g.front() < -band)
    throw std::invalid_argument(
        "detect_contact_window: trajectory starts inside the support");
  if (g.back() < band)
    throw std::invalid_argument(
        "detect_contact_window: trajectory too short (still in contact at the "
        "end)");

  ContactWindow win;

  // Entrance: either the initial datum already sits on the boundary moving
  // inward, or the first sign change of the gap.
  std::optional<double> tau_minus;
  if (std::abs(g.front()) <= band) {
    const PhasePoint z = tr.state(times.front());
    if ((z.x - z.xbar).dot(z.v - z.vbar) <= 0.0) tau_minus = times.front();
  }
  if (!tau_minus) {
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
      if (g[i] > band && g[i + 1] <= band) {
        tau_minus = (g[i + 1] >= -band)
                         ? times[i + 1]
                         : num::bisect(gap, times[i], times[i + 1], 1e-13, 80);
        break;
      }
    }
  }
  if (!tau_minus) {
    win.none_flag = true;
    return win;
  }

  // Exit: the last time the gap is nonpositive.
  double tau_plus = *tau_minus;
  for (std::size_t i = times.size(); i-- > 0;) {
    if (g[i] <= band) {
      if (g[i] >= -band) {
        tau_plus = times[i];
      } else {
        tau_plus = num::bisect(gap, times[i], times[i + 1], 1e-13, 80);
      }
      break;
    }
  }
  win.tau_minus = *tau_minus;
  win.tau_plus = std::max(tau_plus, *tau_minus);
  win.duration = win.tau_plus - win.tau_minus;
  return win;
}

PhasePoint free_flight(const PhasePoint& z, double dt) {
  PhasePoint out = z;
  out.x += dt * z.v;
  out.xbar += dt * z.vbar;
  return out;
}

}  // namespace spherelab
