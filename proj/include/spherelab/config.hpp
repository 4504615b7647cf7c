// Experiment configuration: potential parameters, initial datum (explicit or named
// preset), hardening grid, interval and tolerances. Configurations load from
// JSON and accept flag overrides; the canonical serialization (which excludes
// execution details such as thread count and output paths) is hashed into
// every output file header.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spherelab/potential.hpp"
#include "spherelab/types.hpp"

namespace spherelab {

// Contact data on the sphere |x - xbar| = 1 at time zero: head_on closes
// along the line of centres, oblique approaches 30 degrees off the normal
// with a centre-of-mass drift, grazing moves tangentially.
enum class Preset { HeadOn, Oblique, Grazing };

PhasePoint preset_datum(Preset p);
Preset preset_from_name(const std::string& name);
std::string preset_name(Preset p);

struct ExperimentConfig {
  // Potential.
  std::string family = "standard";
  double s = 1.0;
  double beta = 3.0;

  // Initial datum: a named preset or explicit phase point.
  std::optional<Preset> preset = Preset::HeadOn;
  PhasePoint datum = preset_datum(Preset::HeadOn);

  // Hardening parameter for single-eps commands, and the sweep grid
  // eps = 2^-k, k = k_min .. k_max.
  double eps = 1e-3;
  int k_min = 6;
  int k_max = 18;

  // Time interval; when unset, commands derive a span that encloses the
  // collision with force-free endpoints.
  std::optional<double> t0;
  std::optional<double> t1;

  // Tolerances.
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double quad_tol = 1e-10;

  // Execution and output (not part of the config hash).
  int threads = 1;
  int fit_skip = 2;
  int samples = 1000;
  std::size_t grid_size = 4096;  // validate-potential grid
  std::string out_path = "out.csv";
  std::string summary_path;

  ReferencePotential make_potential() const;
  std::vector<double> eps_grid() const;

  // Canonical text form of the experiment definition; identical experiments
  // hash identically regardless of thread count or file naming.
  std::string canonical() const;
};

// Parses the JSON config file (all keys optional) and returns the config.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

}  // namespace spherelab
