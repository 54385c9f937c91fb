#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "qxpanse/config.hpp"
#include "qxpanse/io.hpp"
#include "qxpanse/scenario.hpp"

namespace qxaccept {

using namespace qxpanse;

struct Verdict {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Liouville-frame field kept at a chosen step.
struct Probe {
  std::size_t step = 0;
  WignerField field;
};

// Step-by-step run that keeps its history when it has to stop early
// (instability, a solver error or the wall-clock budget).
struct Trace {
  RunConfig config;
  std::vector<TimeSeriesRow> series;  // one row per step, row 0 is the initial state
  Probe min_covariance;               // field at the smallest <{x,p}> after t = 0
  std::vector<Probe> probes;
  FlowField flow;
  std::string stopped;  // empty when every step completed
  double wall_seconds = 0.0;

  bool complete() const { return stopped.empty(); }
  double reached() const { return series.back().t_omega; }
  double scale() const { return config.potential.scale(); }
  double norm_drift() const {
    double d = 0.0;
    for (auto const& r : series) d = std::max(d, std::abs(r.norm - series.front().norm));
    return d;
  }
};

Trace trace_run(RunConfig const& config, double budget_seconds,
                std::vector<std::size_t> const& probe_steps = {});

// Lab-frame interference measures at a probe, on the configured resample grid.
InterferenceReport lab_interference(Trace const& trace, Probe const& probe);

// Writes the trace's time series to dir/name (for later inspection).
void save_series(Trace const& trace, std::filesystem::path const& dir, std::string const& name);

// Linear interpolation of (x, y) samples at xq; x must be increasing.
double interpolate(std::vector<double> const& x, std::vector<double> const& y, double xq);

// Abort threshold for |norm - 1| in the acceptance runs. The grid-scale
// instability moves the norm by percent per step once it sets in, so this
// still stops a diverging run within a step or two, while slow truncation
// drift in strongly diffusive runs is reported rather than fatal.
inline constexpr double kAcceptanceNormBound = 1e-2;

// Baseline lattice (255 x 56, h_x = 0.39, h_p = 0.16) with a quartic well.
RunConfig baseline_lattice(double eta, double noise);

std::string describe_stop(Trace const& trace);

}  // namespace qxaccept
