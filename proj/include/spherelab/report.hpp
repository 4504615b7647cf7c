// Deterministic output formatting: round-trip-exact float text, FNV-1a config
// hashes and the CSV/JSON writers shared by the CLI commands.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spherelab/scattering.hpp"
#include "spherelab/soft.hpp"
#include "spherelab/variation.hpp"

namespace spherelab::report {

// 17 significant digits, '.' decimal, locale-independent: parses back to the
// identical 64-bit value.
std::string format_double(double v);

std::uint64_t fnv1a(const std::string& text);
std::string hash_hex(const std::string& text);

// "# spherelab <version> config=<hash>"
std::string header_line(const std::string& config_hash);

struct TrajectoryRow {
  double t;
  PhasePoint z;
  double energy;
  double separation;
};

void write_trajectory_csv(const std::string& path,
                          const std::string& config_hash,
                          const std::vector<TrajectoryRow>& rows);

// Sweep rows merged with the per-eps convergence rows (matched by position;
// either side may be absent).
void write_sweep_csv(const std::string& path, const std::string& config_hash,
                     const SweepTable& table, const ConvergenceReport* conv);

// Either part may be omitted (nullptr): sweep fits, convergence summary.
std::string sweep_summary_json(const std::string& config_hash,
                               const SweepTable* table,
                               const ConvergenceReport* conv);

void write_variation_csv(const std::string& path,
                         const std::string& config_hash,
                         const ConvergenceReport& conv);

std::string scatter_json(const std::string& config_hash,
                         const SoftScatteringResult& result,
                         const Vec6& hard_post);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace spherelab::report
