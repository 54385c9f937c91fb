#include "qxpanse/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "qxpanse/error.hpp"
#include "qxpanse/scenario.hpp"

namespace qxpanse {

namespace {

std::array<double, 5> as_array(TimeSeriesRow const& r) {
  return {r.mean_x, r.mean_p, r.x2, r.p2, r.xp_sym_hbar};
}

TimeSeriesRow row_from(double t, Moments const& m) {
  return {t, m.mean_x, m.mean_p, m.x2, m.p2, m.xp_over_hbar(), m.norm, 1.0};
}

}  // namespace

void MomentComparison::evaluate() {
  MomentComparison& c = *this;
  c.relative = {};
  c.absolute = {};
  std::size_t const n_rows = std::min(c.series.size(), c.oracle.size());
  std::array<double, 5> scale{};
  for (std::size_t n = 0; n < n_rows; ++n) {
    auto const s = as_array(c.series[n]);
    auto const o = as_array(c.oracle[n]);
    for (std::size_t k = 0; k < 5; ++k) {
      scale[k] = std::max(scale[k], std::abs(o[k]));
      c.absolute[k] = std::max(c.absolute[k], std::abs(s[k] - o[k]));
    }
  }
  for (std::size_t k = 0; k < 5; ++k)
    c.relative[k] = scale[k] > 0.0 ? c.absolute[k] / scale[k] : c.absolute[k];
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

double MomentComparison::worst(std::size_t first, std::size_t last) const {
  return *std::max_element(relative.begin() + static_cast<std::ptrdiff_t>(first),
                           relative.begin() + static_cast<std::ptrdiff_t>(last));
}

MomentComparison compare_with_moment_ode(RunConfig const& config) {
  auto const t0 = std::chrono::steady_clock::now();
  MomentComparison c;
  RunConfig run = config;
  run.resample.enabled = false;
  c.series = run_scenario(run).series;
  oracle::GaussianMoments const start{config.initial.mean_x, config.initial.mean_p,
                                      config.initial.sigma_x * config.initial.sigma_x,
                                      config.initial.sigma_p * config.initial.sigma_p, 0.0};
  auto const params = config.params();
  for (auto const& r : c.series)
    c.oracle.push_back(
        row_from(r.t_omega, oracle::gaussian_moment_ode(params, start, r.t_omega).as_moments()));
  c.evaluate();
  c.wall_seconds = seconds_since(t0);
  return c;
}

oracle::WaveFunction split_operator_reference(RunConfig const& config,
                                              SplitOperatorSettings const& settings) {
  double const half =
      settings.half_width > 0.0 ? settings.half_width : 3.0 * config.potential.scale();
  return oracle::WaveFunction::gaussian(settings.points, half, config.initial.mean_x,
                                        config.initial.mean_p, config.initial.sigma_x);
}

std::vector<TimeSeriesRow> split_operator_series(oracle::WaveFunction& wf,
                                                 Potential const& potential,
                                                 SplitOperatorSettings const& settings,
                                                 std::span<double const> times) {
  std::vector<TimeSeriesRow> rows;
  rows.reserve(times.size());
  for (double t : times) {
    auto const steps = static_cast<std::size_t>(std::llround((t - wf.time) / settings.dtau));
    if (steps > 0) oracle::split_operator_evolve(wf, potential, settings.dtau, steps);
    auto const m = oracle::wave_moments(wf);
    rows.push_back({wf.time, m.mean_x, m.mean_p, m.x2, m.p2, m.xp_sym / kHbar, 1.0, 1.0});
  }
  return rows;
}

double marginal_l1(WignerField const& lab, oracle::WaveFunction const& wf) {
  auto const density = oracle::position_density(wf);
  // Linear interpolation of the simulated marginal onto the oracle samples.
  Marginal const marg = position_marginal(lab);
  double const hx = marg.x[1] - marg.x[0];
  double l1 = 0.0;
  for (std::size_t i = 0; i < wf.size(); ++i) {
    double const f = (wf.x(i) - marg.x.front()) / hx;
    double sim = 0.0;
    if (f >= 0.0 && f <= static_cast<double>(marg.x.size() - 1)) {
      auto const k = std::min(static_cast<std::size_t>(f), marg.x.size() - 2);
      double const a = f - static_cast<double>(k);
      sim = (1.0 - a) * marg.p[k] + a * marg.p[k + 1];
    }
    l1 += std::abs(sim - density[i]) * wf.dx;
  }
  return l1;
}

WavefunctionComparison compare_with_split_operator(RunConfig const& config,
                                                   SplitOperatorSettings const& settings) {
  if (config.gamma != 0.0 || config.noise != 0.0 || !config.run.quantum)
    throw ParameterError("split-operator comparison needs a closed quantum system");
  if (std::abs(config.initial.sigma_x * config.initial.sigma_p - 1.0) > 1e-9)
    throw ParameterError("split-operator comparison needs a minimum-uncertainty initial state");
  auto const t0 = std::chrono::steady_clock::now();
  WavefunctionComparison out;
  RunConfig run = config;
  run.resample.enabled = true;
  RunResult result = run_scenario(run);
  out.moments.series = std::move(result.series);
  out.lab = std::move(*result.lab);

  std::vector<double> times;
  for (auto const& r : out.moments.series) times.push_back(r.t_omega);
  auto wf = split_operator_reference(config, settings);
  out.moments.oracle = split_operator_series(wf, config.params().potential, settings, times);
  out.moments.evaluate();
  out.marginal_l1 = marginal_l1(out.lab, wf);
  out.oracle_density = oracle::position_density(wf);
  out.oracle_x.resize(wf.size());
  for (std::size_t i = 0; i < wf.size(); ++i) out.oracle_x[i] = wf.x(i);
  out.moments.wall_seconds = seconds_since(t0);
  return out;
}

EnsembleComparison compare_with_ensemble(RunConfig const& config, std::size_t samples,
                                         std::uint64_t seed) {
  RunConfig run = config;
  run.run.quantum = false;
  run.resample.enabled = false;
  EnsembleComparison out;
  out.final_row = run_scenario(run).series.back();
  oracle::GaussianSampler const sampler{config.initial.mean_x, config.initial.mean_p,
                                        config.initial.sigma_x, config.initial.sigma_p, seed};
  if (config.gamma != 0.0 || config.noise != 0.0)
    throw ParameterError("ensemble comparison covers closed classical dynamics only");
  auto const flow_steps = config.total_steps() * config.stepper.flow_substeps;
  double const dt = config.stepper.dtau / static_cast<double>(config.stepper.flow_substeps);
  out.ensemble = oracle::classical_ensemble(oracle::sample_gaussian(sampler, samples),
                                            config.params(), dt, flow_steps);
  auto const& e = out.ensemble;
  std::array<double, 5> const sim = as_array(out.final_row);
  std::array<double, 5> const ens = {e.moments.mean_x, e.moments.mean_p, e.moments.x2,
                                     e.moments.p2, e.moments.xp_sym / kHbar};
  std::array<double, 5> const se = {e.se_mean_x, e.se_mean_p, e.se_x2, e.se_p2,
                                    e.se_xp / kHbar};
  for (std::size_t k = 0; k < 5; ++k) {
    out.z[k] = se[k] > 0.0 ? std::abs(sim[k] - ens[k]) / se[k] : 0.0;
    out.relative[k] = std::abs(sim[k] - ens[k]) / std::max(std::abs(ens[k]), 1e-300);
  }
  return out;
}

}  // namespace qxpanse
