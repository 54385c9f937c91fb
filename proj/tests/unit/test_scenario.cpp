#include <cmath>
#include <filesystem>

#include <doctest.h>

#include "qxpanse/error.hpp"
#include "qxpanse/scenario.hpp"
#include "qxpanse/verification.hpp"

using namespace qxpanse;
namespace fs = std::filesystem;

namespace {

RunConfig small_quartic() {
  RunConfig c;
  c.potential.eta = 3.0;
  c.noise = 1e-3;
  c.grid = {48, 48, 0.25, 0.25, 0.0, 0.0};
  c.initial.mean_x = 1.0;
  c.stepper.dtau = 0.1;
  c.stepper.flow_substeps = 2;
  c.run.t_final = 2.0;
  c.run.snapshot_every = 5;
  c.resample = {true, 81, 61, 8.0, 6.0};
  return c;
}

fs::path fresh_dir(std::string const& name) {
  fs::path const dir = fs::temp_directory_path() / "qxpanse_unit" / name;
  fs::remove_all(dir);
  return dir;
}

void check_close(double a, double b) { CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b))); }

}  // namespace

TEST_CASE("scenario: run writes every artifact and analyze reproduces the report") {
  RunConfig const c = small_quartic();
  fs::path const dir = fresh_dir("run");
  RunResult const r = run_scenario(c, dir);
  CHECK(fs::exists(dir / "config.ini"));
  CHECK(fs::exists(dir / "timeseries.csv"));
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "mapped_grid.csv"));
  CHECK(fs::exists(dir / "snapshots" / "liouville_000010.qxwf"));
  CHECK(fs::exists(dir / "snapshots" / "lab_000020.qxwf"));
  CHECK(load_config(dir / "config.ini") == c);
  CHECK(r.series.size() == c.total_steps() + 1);
  CHECK(r.lab.has_value());

  AnalysisResult const a = analyze_path(dir);
  check_close(a.report.timings.max_x_width, r.report.timings.max_x_width);
  check_close(a.report.timings.max_x_width_time, r.report.timings.max_x_width_time);
  check_close(a.report.timings.min_covariance, r.report.timings.min_covariance);
  check_close(a.report.timings.lambda_min, r.report.timings.lambda_min);
  check_close(a.report.interference.negativity, r.report.interference.negativity);
  check_close(a.report.interference.visibility, r.report.interference.visibility);
  CHECK(a.report.interference.status == r.report.interference.status);

  RunReport const parsed = RunReport::from_json(r.report.to_json());
  check_close(parsed.timings.min_covariance_time, r.report.timings.min_covariance_time);
  CHECK(parsed.warnings == r.report.warnings);
}

TEST_CASE("scenario: identical configurations give identical output") {
  RunConfig c = small_quartic();
  c.resample.enabled = false;
  RunResult const a = run_scenario(c);
  c.stepper.threads = 3;
  RunResult const b = run_scenario(c);
  CHECK(a.liouville.values == b.liouville.values);
  REQUIRE(a.series.size() == b.series.size());
  for (std::size_t k = 0; k < a.series.size(); ++k) CHECK(a.series[k].x2 == b.series[k].x2);
}

TEST_CASE("scenario: analysing a lone snapshot") {
  RunConfig const c = small_quartic();
  fs::path const dir = fresh_dir("snap");
  run_scenario(c, dir);
  AnalysisResult const a = analyze_path(dir / "snapshots" / "lab_000020.qxwf");
  CHECK(a.has_marginal);
  CHECK(a.marginal.x.size() == c.resample.nx);
}

TEST_CASE("scenario: sweeps enumerate the cartesian product") {
  fs::path const dir = fresh_dir("sweep");
  RunConfig base = small_quartic();
  auto const entries =
      write_sweep(base, {{"noise.noise_rate", {"0", "1e-3", "1e-2"}}, {"potential.eta", {"3", "4"}}},
                  dir);
  CHECK(entries.size() == 6);
  CHECK(is_sweep_dir(dir));
  CHECK(fs::exists(dir / "sweep.csv"));
  CHECK(load_config(entries[5].dir / "config.ini").noise == entries[5].config.noise);
}

TEST_CASE("scenario: unstable runs stop with InstabilityError") {
  RunConfig c;
  c.potential.eta = 2.0;
  c.noise = 0.0;
  c.grid = {128, 64, 0.15, 0.2, 0.0, 0.0};
  c.stepper.flow_substeps = 2;
  c.run.t_final = 4.0;
  c.resample.enabled = false;
  CHECK_THROWS_AS(run_scenario(c), InstabilityError);
}

TEST_CASE("verification: harmonic open system against the moment equations") {
  RunConfig c;
  c.potential.preset = "harmonic";
  c.gamma = 0.05;
  c.noise = 0.5;
  c.grid = {64, 64, 0.5, 0.5, 0.0, 0.0};
  c.initial.mean_x = 2.0;
  c.stepper.flow_substeps = 2;
  c.run.t_final = 3.0;
  c.resample.enabled = false;
  auto const m = compare_with_moment_ode(c);
  CHECK(m.worst() < 2e-2);
}
