#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qxpanse/config.hpp"
#include "qxpanse/io.hpp"
#include "qxpanse/oracle.hpp"

namespace qxpanse {

// Moment order used by the comparisons: <x>, <p>, <x^2>, <p^2>, <{x,p}>/hbar.
inline constexpr std::array<char const*, 5> kMomentNames = {"mean_x", "mean_p", "x2", "p2",
                                                            "xp_sym_hbar"};

struct MomentComparison {
  // max_t |simulation - oracle| / max_t |oracle|, per moment.
  std::array<double, 5> relative{};
  std::array<double, 5> absolute{};
  std::vector<TimeSeriesRow> series;
  std::vector<TimeSeriesRow> oracle;
  double wall_seconds = 0.0;

  double worst(std::size_t first = 0, std::size_t last = 5) const;
  // Fills relative/absolute from the rows both series have in common.
  void evaluate();
};

// Runs a harmonic (quadratic) configuration and compares every time-series
// row with the Gaussian moment equations started from the same state.
MomentComparison compare_with_moment_ode(RunConfig const& config);

struct SplitOperatorSettings {
  std::size_t points = 8192;
  double half_width = 0.0;  // 0 picks 3 * scale
  double dtau = 1e-3;
};

// Initial wavefunction matching config.initial on the oracle lattice.
oracle::WaveFunction split_operator_reference(RunConfig const& config,
                                              SplitOperatorSettings const& settings);

// Advances wf through the increasing `times`, one moment row per entry.
std::vector<TimeSeriesRow> split_operator_series(oracle::WaveFunction& wf,
                                                 Potential const& potential,
                                                 SplitOperatorSettings const& settings,
                                                 std::span<double const> times);

// L1 distance between the position marginal of a lab-frame field and |psi|^2.
double marginal_l1(WignerField const& lab, oracle::WaveFunction const& wf);

struct WavefunctionComparison {
  MomentComparison moments;
  // L1 distance between the final position marginals.
  double marginal_l1 = 0.0;
  WignerField lab;
  std::vector<double> oracle_x;
  std::vector<double> oracle_density;
};

// Closed-system run (gamma = noise = 0, quantum mode) against the
// split-operator wavefunction evolution of the same initial Gaussian.
WavefunctionComparison compare_with_split_operator(RunConfig const& config,
                                                   SplitOperatorSettings const& settings = {});

struct EnsembleComparison {
  // |simulation - ensemble| / standard error of the ensemble mean, per moment.
  std::array<double, 5> z{};
  std::array<double, 5> relative{};
  oracle::EnsembleEstimate ensemble;
  TimeSeriesRow final_row;
};

// Classical-mode run against an independent classical trajectory ensemble.
EnsembleComparison compare_with_ensemble(RunConfig const& config, std::size_t samples,
                                         std::uint64_t seed = 12345);

}  // namespace qxpanse
