#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <vector>

#include "spherelab/config.hpp"
#include "spherelab/geometry.hpp"
#include "spherelab/report.hpp"

using namespace spherelab;

TEST_CASE("presets lie on the contact sphere with the advertised approach") {
  for (Preset pr : {Preset::HeadOn, Preset::Oblique, Preset::Grazing}) {
    const PhasePoint z = preset_datum(pr);
    const Vec3 y = z.x - z.xbar;
    const Vec3 w = z.v - z.vbar;
    CHECK(std::abs(y.norm() - 1.0) <= 1e-15);
    if (pr == Preset::Grazing) {
      CHECK(std::abs(y.dot(w)) <= 1e-15);
    } else {
      CHECK(y.dot(w) < 0.0);
    }
  }
  // Oblique exercises a genuinely three-dimensional datum.
  const CollisionInvariants inv =
      collision_invariants(to_reduced(preset_datum(Preset::Oblique)));
  CHECK(inv.A0 > 0.0);
  CHECK(2 * inv.E0 - inv.A0 > 0.0);
}

TEST_CASE("preset names round trip") {
  for (Preset pr : {Preset::HeadOn, Preset::Oblique, Preset::Grazing})
    CHECK(preset_from_name(preset_name(pr)) == pr);
  CHECK_THROWS_AS(preset_from_name("sideways"), std::invalid_argument);
}

TEST_CASE("config parsing: defaults, overrides, explicit datum") {
  const ExperimentConfig defaults = parse_config("{}");
  CHECK(defaults.family == "standard");
  CHECK(defaults.beta == 3.0);
  CHECK(defaults.preset.has_value());

  const char* text = R"({
    "potential": {"family": "standard", "s": 1.5, "beta": 2.5},
    "datum": {"x": [0,0,0], "xbar": [0,0,1], "v": [0,0,0.3], "vbar": [0,0,-0.3]},
    "eps": 0.25,
    "eps_grid": {"k_min": 4, "k_max": 9},
    "interval": {"t0": -1.0, "t1": 3.0},
    "tolerances": {"rel_tol": 1e-9, "abs_tol": 1e-11, "quad_tol": 1e-8},
    "output": {"path": "traj.csv", "summary": "sum.json"},
    "threads": 4,
    "fit_skip": 1
  })";
  const ExperimentConfig cfg = parse_config(text);
  CHECK(cfg.s == 1.5);
  CHECK(cfg.beta == 2.5);
  CHECK_FALSE(cfg.preset.has_value());
  CHECK(cfg.datum.xbar == Vec3(0, 0, 1));
  CHECK(cfg.eps == 0.25);
  CHECK(cfg.k_min == 4);
  CHECK(cfg.k_max == 9);
  REQUIRE(cfg.t0.has_value());
  CHECK(*cfg.t0 == -1.0);
  CHECK(cfg.rel_tol == 1e-9);
  CHECK(cfg.out_path == "traj.csv");
  CHECK(cfg.threads == 4);
  CHECK(cfg.fit_skip == 1);

  const auto grid = cfg.eps_grid();
  REQUIRE(grid.size() == 6);
  CHECK(grid.front() == std::ldexp(1.0, -4));
  CHECK(grid.back() == std::ldexp(1.0, -9));
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] < grid[i - 1]);

  CHECK_THROWS_AS(parse_config("{nope"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"datum": {"x": [1,2]}})"),
                  std::invalid_argument);
}

TEST_CASE("config hash ignores execution details but sees the experiment") {
  ExperimentConfig a;
  ExperimentConfig b;
  b.threads = 8;
  b.out_path = "elsewhere.csv";
  CHECK(report::hash_hex(a.canonical()) == report::hash_hex(b.canonical()));

  ExperimentConfig c;
  c.beta = 4.0;
  CHECK(report::hash_hex(a.canonical()) != report::hash_hex(c.canonical()));
}

TEST_CASE("float formatting round trips exactly") {
  for (double v : {0.25, 1.0 / 3.0, 2.0 - std::sqrt(3.0) / 2.0, 1e-300,
                   -7.123456789012345e17, 0.0}) {
    const std::string s = report::format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
    CHECK(s.find(',') == std::string::npos);
  }
}

TEST_CASE("unknown potential family is rejected") {
  ExperimentConfig cfg;
  cfg.family = "mystery";
  CHECK_THROWS_AS(cfg.make_potential(), std::invalid_argument);
}

TEST_CASE("output files carry the version/config header line") {
  const std::string path = "header_check.csv";
  std::vector<report::TrajectoryRow> rows(1);
  rows[0].t = 0.0;
  rows[0].z = preset_datum(Preset::HeadOn);
  rows[0].energy = 0.25;
  rows[0].separation = 1.0;
  report::write_trajectory_csv(path, "deadbeefdeadbeef", rows);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# spherelab 0.1.0 config=deadbeefdeadbeef");
  std::getline(in, line);
  CHECK(line.substr(0, 2) == "t,");
  std::remove(path.c_str());
}
