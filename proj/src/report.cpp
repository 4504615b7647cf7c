#include "spherelab/report.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "spherelab/version.hpp"

namespace spherelab::report {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(const std::string& text) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(text)));
  return std::string(buf);
}

std::string header_line(const std::string& config_hash) {
  std::ostringstream os;
  os << "# " << kToolName << " " << kToolVersion << " config=" << config_hash;
  return os.str();
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: no platform newline
  if (!out) throw std::runtime_error("cannot open output file " + path);
  return out;
}

void append_vec3(std::string* line, const Vec3& v) {
  for (int i = 0; i < 3; ++i) {
    *line += ',';
    *line += format_double(v[i]);
  }
}

nlohmann::json meta_json(const std::string& config_hash) {
  return nlohmann::json{{"tool", kToolName},
                        {"version", kToolVersion},
                        {"config", config_hash}};
}

nlohmann::json phase_json(const PhasePoint& z) {
  auto arr = [](const Vec3& v) {
    return nlohmann::json::array({v[0], v[1], v[2]});
  };
  return nlohmann::json{
      {"x", arr(z.x)}, {"xbar", arr(z.xbar)}, {"v", arr(z.v)},
      {"vbar", arr(z.vbar)}};
}

}  // namespace

void write_trajectory_csv(const std::string& path,
                          const std::string& config_hash,
                          const std::vector<TrajectoryRow>& rows) {
  auto out = open_out(path);
  out << header_line(config_hash) << '\n';
  out << "t,x1,x2,x3,xbar1,xbar2,xbar3,v1,v2,v3,vbar1,vbar2,vbar3,H,sep\n";
  for (const auto& row : rows) {
    std::string line = format_double(row.t);
    append_vec3(&line, row.z.x);
    append_vec3(&line, row.z.xbar);
    append_vec3(&line, row.z.v);
    append_vec3(&line, row.z.vbar);
    line += ',';
    line += format_double(row.energy);
    line += ',';
    line += format_double(row.separation);
    out << line << '\n';
  }
}

void write_sweep_csv(const std::string& path, const std::string& config_hash,
                     const SweepTable& table, const ConvergenceReport* conv) {
  auto out = open_out(path);
  out << header_line(config_hash) << '\n';
  out << "eps,rho_star,tau_star,theta_star,apse1,apse2,apse3,scatter_err,"
         "l1_dist,p_var,ok,note\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const SweepRow& r = table.rows[i];
    std::string line = format_double(r.eps);
    line += ',';
    line += format_double(r.rho_star);
    line += ',';
    line += format_double(r.tau_star);
    line += ',';
    line += format_double(r.theta_star);
    append_vec3(&line, r.apse);
    line += ',';
    line += format_double(r.scatter_err);
    const bool have_conv = conv && i < conv->rows.size() && conv->rows[i].ok;
    line += ',';
    line += have_conv ? format_double(conv->rows[i].l1_dist) : "";
    line += ',';
    line += have_conv ? format_double(conv->rows[i].p_var) : "";
    line += ',';
    line += r.ok ? "1" : "0";
    line += ',';
    line += r.note;
    out << line << '\n';
  }
}

std::string sweep_summary_json(const std::string& config_hash,
                               const SweepTable* table,
                               const ConvergenceReport* conv) {
  nlohmann::json j;
  j["meta"] = meta_json(config_hash);
  if (table) {
    j["slope"] = table->summary.slope;
    j["slope_ci"] = 2.0 * table->summary.slope_stderr;
    j["beta_inverse"] = table->summary.beta_inverse;
    j["fit_skip"] = table->summary.fit_skip;
  }
  if (conv) {
    j["l1_slope"] = conv->l1_slope;
    j["l1_decreasing"] = conv->l1_decreasing;
    j["var_max"] = conv->bound.var_max;
    j["var_hard"] = conv->bound.var_hard;
    j["conservation_max_residual"] = conv->conservation_max_residual;
    j["min_separation_hard"] = conv->min_separation_hard;
  }
  return j.dump(2) + "\n";
}

void write_variation_csv(const std::string& path,
                         const std::string& config_hash,
                         const ConvergenceReport& conv) {
  auto out = open_out(path);
  out << header_line(config_hash) << '\n';
  out << "eps,p_var,l1_dist,converged,ok,note\n";
  for (std::size_t i = 0; i < conv.rows.size(); ++i) {
    const ConvergenceRow& r = conv.rows[i];
    const bool converged =
        i < conv.bound.rows.size() && conv.bound.rows[i].converged;
    std::string line = format_double(r.eps);
    line += ',';
    line += format_double(r.p_var);
    line += ',';
    line += format_double(r.l1_dist);
    line += ',';
    line += converged ? "1" : "0";
    line += ',';
    line += r.ok ? "1" : "0";
    line += ',';
    line += r.note;
    out << line << '\n';
  }
}

std::string scatter_json(const std::string& config_hash,
                         const SoftScatteringResult& result,
                         const Vec6& hard_post) {
  nlohmann::json j;
  j["meta"] = meta_json(config_hash);
  j["eps"] = result.analysis.epsilon;
  j["rho_star"] = result.analysis.rho_star;
  j["tau_star"] = result.analysis.tau_star;
  j["theta_star"] = result.analysis.theta_star;
  j["apse"] = nlohmann::json::array({result.analysis.apse[0],
                                     result.analysis.apse[1],
                                     result.analysis.apse[2]});
  j["E0"] = result.analysis.invariants_in.E0;
  j["A0"] = result.analysis.invariants_in.A0;
  j["pre"] = phase_json(result.pre);
  j["post"] = phase_json(result.post);
  j["scatter_err"] = (result.post.velocities() - hard_post).norm();
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  auto out = open_out(path);
  out << content;
}

}  // namespace spherelab::report
