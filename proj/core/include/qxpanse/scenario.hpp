#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qxpanse/config.hpp"
#include "qxpanse/io.hpp"
#include "qxpanse/observables.hpp"
#include "qxpanse/stepper.hpp"

namespace qxpanse {

inline constexpr double kInitialTruncationBound = 1e-3;

// Gaussian W = exp(-du^2/(2 sx^2) - dv^2/(2 sp^2)) / (2 pi sx sp), rescaled so
// the discrete norm is 1. Throws ParameterError for sub-Heisenberg widths
// (sx sp < hbar / 2 in zero-point units, i.e. < 1) or when the lattice cuts
// off more than kInitialTruncationBound of the mass.
WignerField gaussian_initial(PhaseGrid const& grid, InitialSpec const& spec);

struct MomentTimings {
  double max_x_width = 0.0;       // max sqrt<x^2> / (scale x_zpf)
  double max_x_width_time = 0.0;  // Omega t
  double min_covariance = 0.0;    // min <{x,p}> / hbar
  double min_covariance_time = 0.0;
  double lambda_min = 1.0;
  double lambda_min_time = 0.0;
  double norm_drift = 0.0;  // max |norm - norm(0)|
};

// Max-variance / covariance-minimum instants, parabolically refined between
// samples.
MomentTimings moment_timings(std::vector<TimeSeriesRow> const& series, double scale);

struct InterferenceReport {
  std::string status = "not computed";  // ok | no interference | not computed
  double fringe_spacing = 0.0;
  double visibility = 0.0;
  std::size_t peaks = 0;
  double negativity = 0.0;  // min W / max W of the lab-frame field
  std::size_t diverged = 0;
  std::size_t outside = 0;
};

InterferenceReport interference_report(WignerField const& lab, double noise_floor);

// One time-series row (moments through the forward map, lambda_min) for the
// simulation's current state.
TimeSeriesRow series_row(Simulation const& sim);

// Throws InstabilityError when the row's norm leaves
// [n0 - bound, n0 + gamma t + bound] with bound = run.norm_drift_bound (0 disables).
void check_norm_drift(RunConfig const& config, double initial_norm, TimeSeriesRow const& row,
                      std::size_t step);

// Lab-frame field on the configured resample lattice for a Liouville-frame
// field taken after `steps` PDE steps. Diverged/outside counts go to stats.
WignerField to_lab(WignerField const& liouville, RunConfig const& config, std::size_t steps,
                   InterferenceReport* stats = nullptr);

struct RunReport {
  double scale = 1.0;
  double t_final = 0.0;
  std::size_t steps = 0;
  double gamma = 0.0;
  double noise = 0.0;
  bool quantum = true;
  MomentTimings timings;
  InterferenceReport interference;
  double boundary_mass = 0.0;
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;

  std::string to_json() const;
  static RunReport from_json(std::string const& text);
};

struct RunResult {
  std::vector<TimeSeriesRow> series;
  RunReport report;
  WignerField liouville;
  std::optional<WignerField> lab;
  FlowField flow;
};

using ProgressFn = std::function<void(std::size_t step, std::size_t total, double t)>;

// Runs a configuration in-process. When out_dir is non-empty it receives
// config.ini, timeseries.csv, report.json, snapshots/ and mapped_grid.csv.
RunResult run_scenario(RunConfig const& config, std::filesystem::path const& out_dir = {},
                       ProgressFn const& progress = {});

struct AnalysisResult {
  std::filesystem::path source;
  RunReport report;
  Marginal marginal;
  bool has_marginal = false;
};

// Accepts a run directory (re-analyses its stored files) or a single snapshot.
AnalysisResult analyze_path(std::filesystem::path const& path);

struct SweepEntry {
  std::filesystem::path dir;
  RunConfig config;
};

// Cartesian product of "section.key" -> value lists applied to base; writes
// dir/run_NNN/config.ini and dir/sweep.csv.
std::vector<SweepEntry> write_sweep(RunConfig const& base,
                                    std::vector<std::pair<std::string, std::vector<std::string>>> const& axes,
                                    std::filesystem::path const& dir);

struct SweepSummaryRow {
  std::filesystem::path dir;
  double scale = 1.0;
  double noise = 0.0;
  double visibility = 0.0;
  double fringe_spacing = 0.0;
  std::string status;
};

struct SweepSummary {
  std::vector<SweepSummaryRow> rows;
  // Per scale: visibility monotone non-increasing in noise.
  bool monotone = true;
  std::string to_json() const;
};

SweepSummary analyze_sweep(std::filesystem::path const& dir);
bool is_sweep_dir(std::filesystem::path const& dir);

// Noise level halving the noise-free visibility, by log-linear interpolation
// of (noise, visibility) pairs sorted by noise; the first pair must be
// noise = 0. Returns nullopt when visibility never drops to half.
std::optional<double> half_visibility_noise(std::vector<std::pair<double, double>> points);

}  // namespace qxpanse
