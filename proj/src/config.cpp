#include "spherelab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "spherelab/report.hpp"

namespace spherelab {

PhasePoint preset_datum(Preset p) {
  PhasePoint z;
  z.x = Vec3(0.0, 0.0, 0.0);
  z.xbar = Vec3(1.0, 0.0, 0.0);
  switch (p) {
    case Preset::HeadOn:
      z.v = Vec3(0.5, 0.0, 0.0);
      z.vbar = Vec3(-0.5, 0.0, 0.0);
      break;
    case Preset::Oblique: {
      // Relative speed 0.2 at 30 degrees off the line of centres, plus a
      // small centre-of-mass drift.
      const double wx = 0.1 * std::sqrt(3.0);
      const Vec3 half_w(0.5 * wx, 0.05, 0.0);
      const Vec3 drift(0.0, 0.0, 0.05);
      z.v = drift + half_w;
      z.vbar = drift - half_w;
      break;
    }
    case Preset::Grazing:
      z.v = Vec3(0.0, 0.25, 0.0);
      z.vbar = Vec3(0.0, -0.25, 0.0);
      break;
  }
  return z;
}

Preset preset_from_name(const std::string& name) {
  if (name == "head_on") return Preset::HeadOn;
  if (name == "oblique") return Preset::Oblique;
  if (name == "grazing") return Preset::Grazing;
  throw std::invalid_argument("unknown preset: " + name);
}

std::string preset_name(Preset p) {
  switch (p) {
    case Preset::HeadOn: return "head_on";
    case Preset::Oblique: return "oblique";
    case Preset::Grazing: return "grazing";
  }
  return "";
}

ReferencePotential ExperimentConfig::make_potential() const {
  if (family != "standard")
    throw std::invalid_argument("unknown potential family: " + family);
  return standard_family(s, beta);
}

std::vector<double> ExperimentConfig::eps_grid() const {
  if (k_min > k_max)
    throw std::invalid_argument("eps grid: k_min must not exceed k_max");
  std::vector<double> grid;
  for (int k = k_min; k <= k_max; ++k) grid.push_back(std::ldexp(1.0, -k));
  return grid;
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream os;
  os << "family=" << family << ";s=" << report::format_double(s)
     << ";beta=" << report::format_double(beta);
  os << ";datum=";
  if (preset) {
    os << preset_name(*preset);
  } else {
    const Vec12 z = datum.packed();
    for (int i = 0; i < 12; ++i) os << (i ? "," : "") << report::format_double(z[i]);
  }
  os << ";eps=" << report::format_double(eps) << ";k=" << k_min << ".." << k_max;
  os << ";t0=" << (t0 ? report::format_double(*t0) : "auto");
  os << ";t1=" << (t1 ? report::format_double(*t1) : "auto");
  os << ";rel=" << report::format_double(rel_tol)
     << ";abs=" << report::format_double(abs_tol)
     << ";quad=" << report::format_double(quad_tol);
  os << ";fit_skip=" << fit_skip << ";samples=" << samples
     << ";grid=" << grid_size;
  return os.str();
}

namespace {

Vec3 vec3_from(const nlohmann::json& j, const char* key) {
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3)
    throw std::invalid_argument(std::string("config: ") + key +
                                " must be a 3-array");
  return Vec3(a[0].get<double>(), a[1].get<double>(), a[2].get<double>());
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  if (j.contains("potential")) {
    const auto& p = j["potential"];
    if (p.contains("family")) cfg.family = p["family"].get<std::string>();
    if (p.contains("s")) cfg.s = p["s"].get<double>();
    if (p.contains("beta")) cfg.beta = p["beta"].get<double>();
  }
  if (j.contains("datum")) {
    const auto& d = j["datum"];
    if (d.contains("preset")) {
      cfg.preset = preset_from_name(d["preset"].get<std::string>());
      cfg.datum = preset_datum(*cfg.preset);
    } else {
      cfg.preset.reset();
      cfg.datum.x = vec3_from(d, "x");
      cfg.datum.xbar = vec3_from(d, "xbar");
      cfg.datum.v = vec3_from(d, "v");
      cfg.datum.vbar = vec3_from(d, "vbar");
    }
  }
  if (j.contains("eps")) cfg.eps = j["eps"].get<double>();
  if (j.contains("eps_grid")) {
    cfg.k_min = j["eps_grid"].value("k_min", cfg.k_min);
    cfg.k_max = j["eps_grid"].value("k_max", cfg.k_max);
  }
  if (j.contains("interval")) {
    if (j["interval"].contains("t0")) cfg.t0 = j["interval"]["t0"].get<double>();
    if (j["interval"].contains("t1")) cfg.t1 = j["interval"]["t1"].get<double>();
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    cfg.rel_tol = t.value("rel_tol", cfg.rel_tol);
    cfg.abs_tol = t.value("abs_tol", cfg.abs_tol);
    cfg.quad_tol = t.value("quad_tol", cfg.quad_tol);
  }
  if (j.contains("output")) {
    cfg.out_path = j["output"].value("path", cfg.out_path);
    cfg.summary_path = j["output"].value("summary", cfg.summary_path);
  }
  cfg.threads = j.value("threads", cfg.threads);
  cfg.fit_skip = j.value("fit_skip", cfg.fit_skip);
  cfg.samples = j.value("samples", cfg.samples);
  cfg.grid_size = j.value("grid_size", cfg.grid_size);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace spherelab
