// Variation and convergence diagnostics: pointwise variation over partitions
// of velocity paths, L1 distances between soft and hard trajectories, the
// uniform bound over a hardening sweep, and the combined convergence report
// (bounded variation + L1 convergence + conservation residuals).
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spherelab/potential.hpp"
#include "spherelab/types.hpp"

namespace spherelab {

// A 6-vector path of time (velocity pair of the two bodies, or any sampled
// curve); dense-output interpolants plug in directly.
using Path6 = std::function<Vec6(double)>;

// Strictly increasing interior points of an interval.
struct Partition {
  std::vector<double> points;

  // N interior points of the uniform dyadic partition of (t0, t1).
  static Partition uniform(double t0, double t1, std::size_t n);
};

// Sum of Euclidean increments of u over the partition.
double pointwise_variation(const Path6& u, const Partition& part);

struct VariationReport {
  double p_var = 0.0;
  double l1_norm = 0.0;
  double bv_norm = 0.0;
  bool converged = false;
  std::size_t final_points = 0;  // partition size at the last refinement
};

// Doubles a uniform dyadic partition (refinements are nested, so the sums are
// nondecreasing) until the relative change drops below 1e-8 or the partition
// exceeds 2^20 points.
VariationReport variation_refined(const Path6& u, double t0, double t1);

// integral of |u - w| over (t0, t1) by adaptive quadrature, split at the
// supplied breakpoints (collision time, contact-window endpoints) so no panel
// straddles a kink.
double l1_distance(const Path6& u, const Path6& w, double t0, double t1,
                   const std::vector<double>& breakpoints = {},
                   double abs_tol = 1e-9);

struct VariationRow {
  double eps = 0.0;
  double p_var = 0.0;
  bool converged = false;
  bool ok = false;
  std::string note;
};

struct BoundReport {
  std::vector<VariationRow> rows;   // by decreasing eps
  double var_max = 0.0;             // max p_var over the grid
  double var_hard = 0.0;            // variation of the hard-sphere limit
  double ratio_max = 0.0;           // var_max / var_hard (0 when var_hard = 0)
  bool uniform_ok = false;          // sweep stayed within the uniform proxy
};

// Refined variation of the soft velocity pair for every eps in the grid,
// compared against the hard-limit jump. The uniform proxy accepts the sweep
// when its supremum does not exceed 1.5x the coarsest-eps value plus the hard
// variation.
BoundReport uniform_bound_check(const PhasePoint& z0,
                                const ReferencePotential& base,
                                const std::vector<double>& eps_grid,
                                double t0, double t1);

struct ConvergenceRow {
  double eps = 0.0;
  double l1_dist = 0.0;
  double p_var = 0.0;
  bool ok = false;
  std::string note;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  BoundReport bound;
  double l1_slope = 0.0;            // log-log rate of the L1 distances
  double l1_slope_stderr = 0.0;
  bool l1_decreasing = false;
  double conservation_max_residual = 0.0;
  double min_separation_hard = 0.0; // non-penetration of the limit candidate
};

// Bounded variation + strong L1 convergence toward the hard-sphere velocity
// path, plus conservation residuals of both the soft runs and the limit.
ConvergenceReport weak_star_report(const PhasePoint& z0,
                                   const ReferencePotential& base,
                                   const std::vector<double>& eps_grid,
                                   double t0, double t1);

}  // namespace spherelab
