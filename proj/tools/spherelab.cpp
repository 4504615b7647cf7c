// spherelab - soft/hard two-body collision laboratory.
//
// Subcommands:
//   validate-potential  check reference-potential hypotheses, print constants
//   simulate            integrate the soft system, write a trajectory CSV
//   surgery             exact hard-sphere trajectory, write a trajectory CSV
//   scatter             single-eps collision analysis, JSON to stdout/file
//   sweep               hardening sweep + convergence report (CSV + JSON)
//   variation           per-eps variation/L1 report (CSV + JSON)
//
// Exit codes: 0 success, 1 runtime/numerical failure, 2 invalid config or
// hypothesis failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "spherelab/config.hpp"
#include "spherelab/geometry.hpp"
#include "spherelab/hard.hpp"
#include "spherelab/report.hpp"
#include "spherelab/scattering.hpp"
#include "spherelab/soft.hpp"
#include "spherelab/variation.hpp"
#include "spherelab/version.hpp"

namespace {

using namespace spherelab;

struct Cli {
  std::optional<std::string> config_path;
  std::optional<std::string> preset;
  std::optional<double> eps;
  std::optional<double> s;
  std::optional<double> beta;
  std::optional<double> t0;
  std::optional<double> t1;
  std::optional<double> tol_rel;
  std::optional<double> tol_abs;
  std::optional<double> quad_tol;
  std::optional<int> threads;
  std::optional<int> k_min;
  std::optional<int> k_max;
  std::optional<int> fit_skip;
  std::optional<int> samples;
  std::optional<std::string> out;
  std::optional<std::string> summary;
};

ExperimentConfig resolve(const Cli& cli) {
  ExperimentConfig cfg =
      cli.config_path ? load_config(*cli.config_path) : ExperimentConfig{};
  if (cli.preset) {
    cfg.preset = preset_from_name(*cli.preset);
    cfg.datum = preset_datum(*cfg.preset);
  }
  if (cli.eps) cfg.eps = *cli.eps;
  if (cli.s) cfg.s = *cli.s;
  if (cli.beta) cfg.beta = *cli.beta;
  if (cli.t0) cfg.t0 = *cli.t0;
  if (cli.t1) cfg.t1 = *cli.t1;
  if (cli.tol_rel) cfg.rel_tol = *cli.tol_rel;
  if (cli.tol_abs) cfg.abs_tol = *cli.tol_abs;
  if (cli.quad_tol) cfg.quad_tol = *cli.quad_tol;
  if (cli.threads) cfg.threads = *cli.threads;
  if (cli.k_min) cfg.k_min = *cli.k_min;
  if (cli.k_max) cfg.k_max = *cli.k_max;
  if (cli.fit_skip) cfg.fit_skip = *cli.fit_skip;
  if (cli.samples) cfg.samples = *cli.samples;
  if (cli.out) cfg.out_path = *cli.out;
  if (cli.summary) cfg.summary_path = *cli.summary;
  return cfg;
}

// Time span with force-free endpoints: for contact data the collision lasts
// about twice the closest-approach time, so T = 2 (1 + duration) covers it.
std::pair<double, double> scattering_span(const ExperimentConfig& cfg,
                                          const HardenedPotential& pot) {
  if (cfg.t0 && cfg.t1) return {*cfg.t0, *cfg.t1};
  double duration = 0.0;
  try {
    const ReducedState r = to_reduced(cfg.datum);
    const CollisionInvariants inv = collision_invariants(r);
    duration = 2.0 * tau_star(inv, pot, cfg.quad_tol);
  } catch (const std::exception&) {
    duration = 0.0;  // non-collisional datum: plain free flight
  }
  const double t1 = 2.0 * (1.0 + duration);
  return {cfg.t0.value_or(0.0), cfg.t1.value_or(t1)};
}

int cmd_validate_potential(const ExperimentConfig& cfg) {
  ReferencePotential pot = cfg.make_potential();
  const ValidationReport rep = validate_hypotheses(pot, cfg.grid_size);
  if (!rep.passed) {
    std::cout << "FAIL: " << rep.failure << " at r = "
              << report::format_double(rep.failure_point) << "\n";
    return 2;
  }
  const HypothesisConstants& c = rep.constants;
  std::cout << "OK: hypotheses hold on a " << rep.grid_size << "-point grid\n"
            << "  c1     = " << report::format_double(c.c1) << "\n"
            << "  c2     = " << report::format_double(c.c2) << "\n"
            << "  kappa1 = " << report::format_double(c.kappa1) << "\n"
            << "  kappa2 = " << report::format_double(c.kappa2) << "\n"
            << "  r0     = " << report::format_double(c.r0) << "\n";
  return 0;
}

int cmd_simulate(const ExperimentConfig& cfg) {
  const HardenedPotential pot(cfg.make_potential(), cfg.eps);
  const auto [t0, t1] = scattering_span(cfg, pot);
  SoftProblem problem{pot, cfg.datum, t0, t1, cfg.rel_tol, cfg.abs_tol};
  const SampledTrajectory tr = integrate(problem);

  std::vector<report::TrajectoryRow> rows;
  rows.reserve(cfg.samples + 1);
  for (int i = 0; i <= cfg.samples; ++i) {
    const double t = t0 + (t1 - t0) * static_cast<double>(i) / cfg.samples;
    report::TrajectoryRow row;
    row.t = t;
    row.z = tr.state(t);
    row.energy = soft_hamiltonian(row.z, pot);
    row.separation = (row.z.x - row.z.xbar).norm();
    rows.push_back(row);
  }
  report::write_trajectory_csv(cfg.out_path, report::hash_hex(cfg.canonical()),
                               rows);
  std::cout << "wrote " << cfg.out_path << " (" << rows.size()
            << " samples, energy drift "
            << report::format_double(tr.energy_drift()) << ")\n";
  return 0;
}

int cmd_surgery(const ExperimentConfig& cfg) {
  const HardTrajectory tr = surgery_solve(cfg.datum);
  const double t0 = cfg.t0.value_or(0.0);
  const double t1 = cfg.t1.value_or(2.0);

  std::vector<report::TrajectoryRow> rows;
  rows.reserve(cfg.samples + 1);
  for (int i = 0; i <= cfg.samples; ++i) {
    const double t = t0 + (t1 - t0) * static_cast<double>(i) / cfg.samples;
    report::TrajectoryRow row;
    row.t = t;
    row.z = eval_hard(tr, t);
    row.energy = 0.5 * kinetic_energy(row.z);
    row.separation = (row.z.x - row.z.xbar).norm();
    rows.push_back(row);
  }
  report::write_trajectory_csv(cfg.out_path, report::hash_hex(cfg.canonical()),
                               rows);
  std::cout << "wrote " << cfg.out_path;
  if (tr.collision_time && !tr.grazing)
    std::cout << " (collision at t = "
              << report::format_double(*tr.collision_time) << ")";
  else if (tr.grazing)
    std::cout << " (grazing contact)";
  else
    std::cout << " (no collision)";
  std::cout << "\n";
  return 0;
}

int cmd_scatter(const ExperimentConfig& cfg) {
  const HardenedPotential pot(cfg.make_potential(), cfg.eps);
  const SoftScatteringResult res = soft_scatter(cfg.datum, pot, cfg.quad_tol);
  const Vec3 n = (cfg.datum.xbar - cfg.datum.x).normalized();
  const Vec6 hard_post = boltzmann_matrix(n).apply(cfg.datum.velocities());
  const std::string json =
      report::scatter_json(report::hash_hex(cfg.canonical()), res, hard_post);
  if (!cfg.summary_path.empty())
    report::write_text_file(cfg.summary_path, json);
  std::cout << json;
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg) {
  const ReferencePotential base = cfg.make_potential();
  const std::vector<double> grid = cfg.eps_grid();

  SweepOptions opt;
  opt.fit_skip = cfg.fit_skip;
  opt.threads = cfg.threads;
  opt.quad_tol = cfg.quad_tol;
  const SweepTable table = hardening_sweep(cfg.datum, base, grid, opt);

  const double t0 = cfg.t0.value_or(-0.25);
  double t1;
  if (cfg.t1) {
    t1 = *cfg.t1;
  } else {
    // Cover the slowest (largest-eps) collision with force-free endpoints.
    double dmax = 0.0;
    for (const auto& row : table.rows)
      if (row.ok) dmax = std::max(dmax, 2.0 * row.tau_star);
    t1 = std::max(1.0, 2.0 * dmax + 0.5);
  }
  const ConvergenceReport conv =
      weak_star_report(cfg.datum, base, grid, t0, t1);

  const std::string hash = report::hash_hex(cfg.canonical());
  report::write_sweep_csv(cfg.out_path, hash, table, &conv);
  const std::string json = report::sweep_summary_json(hash, &table, &conv);
  if (!cfg.summary_path.empty())
    report::write_text_file(cfg.summary_path, json);
  std::cout << json;
  return 0;
}

int cmd_variation(const ExperimentConfig& cfg) {
  const ReferencePotential base = cfg.make_potential();
  const std::vector<double> grid = cfg.eps_grid();
  const double t0 = cfg.t0.value_or(-0.25);
  const double t1 = cfg.t1.value_or(1.0);
  const ConvergenceReport conv =
      weak_star_report(cfg.datum, base, grid, t0, t1);

  const std::string hash = report::hash_hex(cfg.canonical());
  report::write_variation_csv(cfg.out_path, hash, conv);
  const std::string json = report::sweep_summary_json(hash, nullptr, &conv);
  if (!cfg.summary_path.empty())
    report::write_text_file(cfg.summary_path, json);
  std::cout << json;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"soft/hard two-body collision laboratory"};
  app.set_version_flag("--version",
                       std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);

  Cli cli;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", cli.config_path, "JSON config file");
    sub->add_option("--preset", cli.preset, "head_on | oblique | grazing");
    sub->add_option("--eps", cli.eps, "hardening parameter");
    sub->add_option("--s", cli.s, "origin exponent of the standard family");
    sub->add_option("--beta", cli.beta, "boundary decay exponent");
    sub->add_option("--t0", cli.t0, "interval start");
    sub->add_option("--t1", cli.t1, "interval end");
    sub->add_option("--tol-rel", cli.tol_rel, "integrator relative tolerance");
    sub->add_option("--tol-abs", cli.tol_abs, "integrator absolute tolerance");
    sub->add_option("--quad-tol", cli.quad_tol, "quadrature tolerance");
    sub->add_option("--threads", cli.threads, "sweep worker threads");
    sub->add_option("--kmin", cli.k_min, "smallest k of eps = 2^-k grid");
    sub->add_option("--kmax", cli.k_max, "largest k of eps = 2^-k grid");
    sub->add_option("--fit-skip", cli.fit_skip,
                    "pre-asymptotic points dropped from rate fits");
    sub->add_option("--samples", cli.samples, "trajectory CSV sample count");
    sub->add_option("--out", cli.out, "output CSV path");
    sub->add_option("--summary", cli.summary, "summary JSON path");
  };

  CLI::App* validate = app.add_subcommand(
      "validate-potential", "check reference-potential hypotheses");
  CLI::App* simulate =
      app.add_subcommand("simulate", "integrate the soft system");
  CLI::App* surgery =
      app.add_subcommand("surgery", "exact hard-sphere trajectory");
  CLI::App* scatter =
      app.add_subcommand("scatter", "single-eps collision analysis");
  CLI::App* sweep =
      app.add_subcommand("sweep", "hardening sweep + convergence report");
  CLI::App* variation =
      app.add_subcommand("variation", "variation and L1 report");
  for (CLI::App* sub :
       {validate, simulate, surgery, scatter, sweep, variation})
    add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg = resolve(cli);
    if (validate->parsed()) return cmd_validate_potential(cfg);
    if (simulate->parsed()) return cmd_simulate(cfg);
    if (surgery->parsed()) return cmd_surgery(cfg);
    if (scatter->parsed()) return cmd_scatter(cfg);
    if (sweep->parsed()) return cmd_sweep(cfg);
    if (variation->parsed()) return cmd_variation(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
