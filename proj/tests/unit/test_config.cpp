#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <doctest.h>

#include "property.hpp"
#include "qxpanse/config.hpp"
#include "qxpanse/error.hpp"

using namespace qxpanse;

namespace {

RunConfig random_config(qxtest::Gen& g) {
  RunConfig c;
  char const* presets[] = {"harmonic", "quartic", "custom"};
  c.potential.preset = presets[g.integer(0, 2)];
  c.potential.eta = g.log_uniform(1.0, 1e3);
  for (auto& a : c.potential.c) a = g.normal();
  c.gamma = g.log_uniform(1e-9, 1.0);
  c.noise = g.log_uniform(1e-12, 1.0);
  c.grid = {g.size(8, 600), g.size(8, 300), g.uniform(0.01, 1.0), g.uniform(0.01, 1.0),
            g.normal(), g.normal()};
  c.initial = {g.normal(), g.normal(), g.uniform(1.0, 3.0), g.uniform(1.0, 3.0)};
  c.stepper.dtau = g.uniform(0.001, 0.2);
  c.stepper.flow_substeps = 2 * g.size(1, 10);
  c.stepper.tolerance = g.log_uniform(1e-14, 1e-6);
  c.stepper.evaluation = g.coin() ? EvaluationPoint::kStart : EvaluationPoint::kMidpoint;
  c.stepper.term_cap = g.size(10, 100);
  c.stepper.threads = g.integer(1, 8);
  c.run.t_final = g.uniform(0.0, 300.0);
  c.run.snapshot_every = g.size(0, 100);
  c.run.series_every = g.size(1, 10);
  c.run.frame = static_cast<FrameSelection>(g.integer(0, 2));
  c.run.quantum = g.coin();
  c.run.mapped_grid = g.coin();
  c.run.norm_drift_bound = g.uniform(0.0, 1e-2);
  c.resample = {g.coin(), g.size(8, 900), g.size(8, 400), g.uniform(0.0, 200.0),
                g.uniform(1.0, 10.0)};
  c.noise_floor = g.log_uniform(1e-9, 1e-3);
  return c;
}

}  // namespace

TEST_CASE("config: text round trip is lossless") {
  qxtest::for_all(200, [](qxtest::Gen& g) {
    RunConfig const c = random_config(g);
    std::stringstream s;
    write_config(s, c);
    RunConfig const back = parse_config(s);
    CHECK(back == c);
    CHECK(back.noise == c.noise);
    CHECK(back.grid.hx == c.grid.hx);
    CHECK(back.stepper.evaluation == c.stepper.evaluation);
  });
}

TEST_CASE("config: unknown keys and malformed values are rejected") {
  std::stringstream bad_key("[grid]\nnxx = 10\n");
  CHECK_THROWS_WITH_AS(parse_config(bad_key), doctest::Contains("grid.nxx"), ParameterError);
  std::stringstream bad_value("[noise]\ngamma = fast\n");
  CHECK_THROWS_AS(parse_config(bad_value), ParameterError);
  std::stringstream bad_bool("[run]\nmapped_grid = maybe\n");
  CHECK_THROWS_AS(parse_config(bad_bool), ParameterError);
}

TEST_CASE("config: partial files keep defaults") {
  std::stringstream s("[potential]\neta = 10\n[grid]\nnx = 64\n");
  RunConfig const c = parse_config(s);
  CHECK(c.potential.eta == 10.0);
  CHECK(c.grid.nx == 64);
  CHECK(c.grid.np == RunConfig{}.grid.np);
  CHECK(c.potential.scale() == 10.0);
}

TEST_CASE("config: dotted overrides and environment") {
  RunConfig c;
  set_config_value(c, "noise.noise_rate", "2e-8");
  set_config_value(c, "stepper.evaluation", "midpoint");
  set_config_value(c, "run.frame", "lab");
  CHECK(c.noise == 2e-8);
  CHECK(c.stepper.evaluation == EvaluationPoint::kMidpoint);
  CHECK(c.run.frame == FrameSelection::kLab);
  CHECK_THROWS_AS(set_config_value(c, "noise", "1"), ParameterError);
  CHECK_THROWS_AS(set_config_value(c, "grid.nothing", "1"), ParameterError);

  ::setenv("QXPANSE_GRID_NX", "77", 1);
  ::setenv("QXPANSE_POTENTIAL_ETA", "31", 1);
  auto const env = environment_overrides();
  CHECK(env.at("grid.nx") == "77");
  apply_overrides(c, env);
  CHECK(c.grid.nx == 77);
  CHECK(c.potential.eta == 31.0);
  ::unsetenv("QXPANSE_GRID_NX");
  ::unsetenv("QXPANSE_POTENTIAL_ETA");
}

TEST_CASE("config: validation") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.total_steps() == 3000);
  RunConfig d = c;
  d.run.t_final = 1.01;
  CHECK_THROWS_AS(d.validate(), ParameterError);
  d = c;
  d.grid.nx = 4;
  CHECK_THROWS_AS(d.validate(), ParameterError);
  d = c;
  d.noise = -1.0;
  CHECK_THROWS_AS(d.validate(), ParameterError);
}

TEST_CASE("config: derived quantities") {
  RunConfig c;
  auto const p = c.params();
  CHECK(p.potential == Potential::quartic(100.0));
  CHECK(p.noise == 1e-5);
  auto const g = c.phase_grid();
  CHECK(g.nx == 255);
  CHECK(g.u(127) == doctest::Approx(0.0).scale(1.0));
  auto const r = c.resample_grid();
  CHECK(r.nx == 601);
  CHECK(r.u(0) == doctest::Approx(-150.0));
}

TEST_CASE("config: shipped configuration files parse and validate") {
  std::size_t count = 0;
  for (auto const& entry : std::filesystem::directory_iterator(QXPANSE_CONFIG_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    CAPTURE(entry.path().string());
    RunConfig const c = load_config(entry.path());
    CHECK_NOTHROW(c.validate());
    ++count;
  }
  CHECK(count >= 3);
  RunConfig const baseline = load_config(std::filesystem::path(QXPANSE_CONFIG_DIR) / "baseline_eta100.ini");
  RunConfig defaults;
  defaults.run.snapshot_every = 500;
  defaults.resample.x_half_width = 150.0;
  CHECK(baseline == defaults);
}
