#include "qxpanse/scenario.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "qxpanse/error.hpp"
#include "qxpanse/liouville_operator.hpp"

namespace qxpanse {

namespace fs = std::filesystem;
using nlohmann::json;

WignerField gaussian_initial(PhaseGrid const& grid, InitialSpec const& spec) {
  grid.validate();
  if (!(spec.sigma_x > 0.0) || !(spec.sigma_p > 0.0))
    throw ParameterError("initial widths must be positive");
  // hbar / 2 = 1 in zero-point units.
  if (spec.sigma_x * spec.sigma_p < 1.0 - 1e-9)
    throw ParameterError(fmt::format("initial widths {} x {} violate the uncertainty bound",
                                     spec.sigma_x, spec.sigma_p));
  WignerField w;
  w.grid = grid;
  w.values.resize(grid.size());
  double const amp = 1.0 / (2.0 * std::numbers::pi * spec.sigma_x * spec.sigma_p);
  for (std::size_t i = 0; i < grid.nx; ++i) {
    double const du = (grid.u(i) - spec.mean_x) / spec.sigma_x;
    for (std::size_t j = 0; j < grid.np; ++j) {
      double const dv = (grid.v(j) - spec.mean_p) / spec.sigma_p;
      w.values[grid.index(i, j)] = amp * std::exp(-0.5 * (du * du + dv * dv));
    }
  }
  // Lattice renormalization; truncation beyond this bound means the grid is
  // too small for the state.
  double const n = w.norm();
  if (std::abs(n - 1.0) > kInitialTruncationBound)
    throw ParameterError(fmt::format(
        "initial state is not resolved by the grid (discrete norm {}); widen or refine it", n));
  for (auto& a : w.values) a /= n;
  return w;
}

namespace {

// Vertex of the parabola through three samples; falls back to the middle one.
std::pair<double, double> parabolic_vertex(double t0, double y0, double t1, double y1, double t2,
                                           double y2) {
  double const d0 = (y1 - y0) / (t1 - t0);
  double const d1 = (y2 - y1) / (t2 - t1);
  double const a = (d1 - d0) / (t2 - t0);
  if (a == 0.0) return {t1, y1};
  double const b = d0 - a * (t0 + t1);
  double const t = -b / (2.0 * a);
  if (!(t >= t0 && t <= t2)) return {t1, y1};
  double const y = y1 + (t - t1) * (d0 + a * (t - t0));
  return {t, y};
}

template <class Value>
std::pair<double, double> refined_extremum(std::vector<TimeSeriesRow> const& s, Value value,
                                           bool maximum) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < s.size(); ++k) {
    double const v = value(s[k]);
    if (maximum ? v > value(s[best]) : v < value(s[best])) best = k;
  }
  if (best == 0 || best + 1 >= s.size()) return {s[best].t_omega, value(s[best])};
  return parabolic_vertex(s[best - 1].t_omega, value(s[best - 1]), s[best].t_omega,
                          value(s[best]), s[best + 1].t_omega, value(s[best + 1]));
}

json timings_json(MomentTimings const& t, double scale) {
  return {
      {"max_x_width_scaled", t.max_x_width},
      {"max_x_width_time", t.max_x_width_time},
      {"max_x_width_time_scaled", t.max_x_width_time / scale},
      {"min_covariance_over_hbar", t.min_covariance},
      {"min_covariance_over_scale_hbar", t.min_covariance / scale},
      {"min_covariance_over_2_scale_hbar", t.min_covariance / (2.0 * scale)},
      {"min_covariance_time", t.min_covariance_time},
      {"min_covariance_time_scaled", t.min_covariance_time / scale},
      {"lambda_min", t.lambda_min},
      {"lambda_min_time", t.lambda_min_time},
      {"norm_drift", t.norm_drift},
  };
}

std::string snapshot_name(Frame frame, std::size_t step) {
  return fmt::format("{}_{:06}.qxwf", to_string(frame), step);
}

// Latest snapshot of the given frame in dir/snapshots, if any.
std::optional<fs::path> latest_snapshot(fs::path const& dir, Frame frame) {
  fs::path const snaps = dir / "snapshots";
  if (!fs::is_directory(snaps)) return std::nullopt;
  std::optional<fs::path> best;
  std::string const prefix = std::string(to_string(frame)) + "_";
  for (auto const& e : fs::directory_iterator(snaps)) {
    auto const name = e.path().filename().string();
    if (name.rfind(prefix, 0) != 0 || e.path().extension() != ".qxwf") continue;
    if (!best || name > best->filename().string()) best = e.path();
  }
  return best;
}

}  // namespace

TimeSeriesRow series_row(Simulation const& sim) {
  Moments const m = moments(sim.wigner(), sim.flow());
  GridDensity const d = grid_density(sim.flow());
  return {sim.time(), m.mean_x, m.mean_p, m.x2, m.p2, m.xp_over_hbar(), m.norm, d.lambda_min};
}

void check_norm_drift(RunConfig const& config, double initial_norm, TimeSeriesRow const& row,
                      std::size_t step) {
  double const bound = config.run.norm_drift_bound;
  if (bound <= 0.0) return;
  double const lo = initial_norm - bound;
  double const hi = initial_norm + config.gamma * row.t_omega + bound;
  if (!(row.norm >= lo && row.norm <= hi))
    throw InstabilityError(fmt::format(
        "norm {} left [{}, {}] at step {} (Omega t = {}); the Liouville-frame field is "
        "unstable or under-resolved on this grid",
        row.norm, lo, hi, step, row.t_omega));
}

WignerField to_lab(WignerField const& liouville, RunConfig const& config, std::size_t steps,
                   InterferenceReport* stats) {
  auto r = resample_lab_frame(liouville, config.params(), steps * config.stepper.flow_substeps,
                              config.resample_grid(), config.stepper.threads);
  if (stats) {
    stats->diverged = r.diverged;
    stats->outside = r.outside;
  }
  return std::move(r.field);
}

MomentTimings moment_timings(std::vector<TimeSeriesRow> const& series, double scale) {
  MomentTimings t;
  if (series.empty()) return t;
  auto const x = refined_extremum(
      series, [](TimeSeriesRow const& r) { return std::sqrt(std::max(r.x2, 0.0)); }, true);
  t.max_x_width_time = x.first;
  t.max_x_width = x.second / scale;
  auto const c =
      refined_extremum(series, [](TimeSeriesRow const& r) { return r.xp_sym_hbar; }, false);
  t.min_covariance_time = c.first;
  t.min_covariance = c.second;
  auto const l = std::min_element(series.begin(), series.end(), [](auto const& a, auto const& b) {
    return a.lambda_min < b.lambda_min;
  });
  t.lambda_min = l->lambda_min;
  t.lambda_min_time = l->t_omega;
  for (auto const& r : series)
    t.norm_drift = std::max(t.norm_drift, std::abs(r.norm - series.front().norm));
  return t;
}

InterferenceReport interference_report(WignerField const& lab, double noise_floor) {
  InterferenceReport r;
  auto const [lo, hi] = std::minmax_element(lab.values.begin(), lab.values.end());
  r.negativity = *hi > 0.0 ? *lo / *hi : 0.0;
  Marginal const m = position_marginal(lab);
  try {
    InterferenceMetrics const im = interference_metrics(m.x, m.p, noise_floor);
    r.status = "ok";
    r.fringe_spacing = im.fringe_spacing;
    r.visibility = im.visibility;
    r.peaks = im.peaks.size();
  } catch (NoInterferenceError const&) {
    r.status = "no interference";
    r.peaks = find_peaks(m.x, m.p, noise_floor).size();
  }
  return r;
}

std::string RunReport::to_json() const {
  json j = {
      {"scale", scale},
      {"t_final", t_final},
      {"steps", steps},
      {"gamma", gamma},
      {"noise_rate", noise},
      {"mode", quantum ? "quantum" : "classical"},
      {"moments", timings_json(timings, scale)},
      {"interference",
       {{"status", interference.status},
        {"fringe_spacing", interference.fringe_spacing},
        {"visibility", interference.visibility},
        {"peaks", interference.peaks},
        {"negativity", interference.negativity},
        {"diverged", interference.diverged},
        {"outside", interference.outside}}},
      {"boundary_mass", boundary_mass},
      {"wall_seconds", wall_seconds},
      {"warnings", warnings},
  };
  return j.dump(2);
}

RunReport RunReport::from_json(std::string const& text) {
  json const j = json::parse(text);
  RunReport r;
  r.scale = j.at("scale");
  r.t_final = j.at("t_final");
  r.steps = j.at("steps");
  r.gamma = j.at("gamma");
  r.noise = j.at("noise_rate");
  r.quantum = j.at("mode") == "quantum";
  auto const& m = j.at("moments");
  r.timings.max_x_width = m.at("max_x_width_scaled");
  r.timings.max_x_width_time = m.at("max_x_width_time");
  r.timings.min_covariance = m.at("min_covariance_over_hbar");
  r.timings.min_covariance_time = m.at("min_covariance_time");
  r.timings.lambda_min = m.at("lambda_min");
  r.timings.lambda_min_time = m.at("lambda_min_time");
  r.timings.norm_drift = m.at("norm_drift");
  auto const& i = j.at("interference");
  r.interference.status = i.at("status");
  r.interference.fringe_spacing = i.at("fringe_spacing");
  r.interference.visibility = i.at("visibility");
  r.interference.peaks = i.at("peaks");
  r.interference.negativity = i.at("negativity");
  r.interference.diverged = i.at("diverged");
  r.interference.outside = i.at("outside");
  r.boundary_mass = j.at("boundary_mass");
  r.wall_seconds = j.at("wall_seconds");
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

RunResult run_scenario(RunConfig const& config, fs::path const& out_dir,
                       ProgressFn const& progress) {
  auto const started = std::chrono::steady_clock::now();
  config.validate();
  PhaseGrid const grid = config.phase_grid();
  Simulation sim(config.params(), gaussian_initial(grid, config.initial), config.stepper);
  std::size_t const total = config.total_steps();
  bool const files = !out_dir.empty();
  bool const want_liouville = config.run.frame != FrameSelection::kLab;
  bool const want_lab = config.run.frame != FrameSelection::kLiouville;

  if (files) {
    fs::create_directories(out_dir / "snapshots");
    save_config(out_dir / "config.ini", config);
  }

  RunResult result;
  auto snapshot = [&](std::size_t step) {
    if (!files) return;
    if (want_liouville)
      write_snapshot(out_dir / "snapshots" / snapshot_name(Frame::kLiouville, step), sim.wigner(),
                     Frame::kLiouville);
    if (want_lab && !(step == total && config.resample.enabled))
      write_snapshot(out_dir / "snapshots" / snapshot_name(Frame::kLab, step),
                     to_lab(sim.wigner(), config, step, nullptr), Frame::kLab);
  };

  double const initial_norm = sim.wigner().norm();
  result.series.push_back(series_row(sim));
  if (total > 0) snapshot(0);
  for (std::size_t step = 1; step <= total; ++step) {
    advance(sim);
    if (step % config.run.series_every == 0 || step == total) {
      result.series.push_back(series_row(sim));
      check_norm_drift(config, initial_norm, result.series.back(), step);
    }
    if (step != total && config.run.snapshot_every != 0 && step % config.run.snapshot_every == 0)
      snapshot(step);
    if (progress) progress(step, total, sim.time());
  }

  RunReport& report = result.report;
  report.scale = config.potential.scale();
  report.t_final = sim.time();
  report.steps = total;
  report.gamma = config.gamma;
  report.noise = config.noise;
  report.quantum = config.run.quantum;
  report.timings = moment_timings(result.series, report.scale);
  report.boundary_mass = boundary_mass_fraction(grid, sim.wigner().values);
  if (report.boundary_mass > kWrapWarningFraction)
    report.warnings.push_back(fmt::format(
        "{:.3g} of the Liouville-frame mass sits on the periodic boundary", report.boundary_mass));

  if (config.resample.enabled) {
    InterferenceReport stats;
    result.lab = to_lab(sim.wigner(), config, total, &stats);
    report.interference = interference_report(*result.lab, config.noise_floor);
    report.interference.diverged = stats.diverged;
    report.interference.outside = stats.outside;
    if (stats.diverged > 0)
      report.warnings.push_back(
          fmt::format("{} backward trajectories diverged during resampling", stats.diverged));
  }

  if (files) {
    snapshot(total);
    if (result.lab && want_lab)
      write_snapshot(out_dir / "snapshots" / snapshot_name(Frame::kLab, total), *result.lab,
                     Frame::kLab);
    write_timeseries(out_dir / "timeseries.csv", result.series);
    if (config.run.mapped_grid) write_mapped_grid(out_dir / "mapped_grid.csv", sim.flow());
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (files) {
    std::ofstream out(out_dir / "report.json");
    out << report.to_json() << '\n';
  }
  result.liouville = sim.wigner();
  result.flow = sim.flow();
  return result;
}

AnalysisResult analyze_path(fs::path const& path) {
  AnalysisResult out;
  out.source = path;
  if (fs::is_regular_file(path)) {
    Snapshot const s = read_snapshot(path);
    out.report.t_final = s.field.time;
    out.marginal = position_marginal(s.field);
    out.has_marginal = true;
    out.report.interference = interference_report(s.field, 1e-6);
    if (s.frame == Frame::kLiouville)
      out.report.warnings.push_back("marginal taken in the Liouville frame");
    return out;
  }
  if (!fs::is_directory(path)) throw FormatError("no such run directory " + path.string(), 0);
  RunConfig const config = load_config(path / "config.ini");
  auto const series = read_timeseries(path / "timeseries.csv");
  RunReport& r = out.report;
  r.scale = config.potential.scale();
  r.t_final = series.back().t_omega;
  r.steps = config.total_steps();
  r.gamma = config.gamma;
  r.noise = config.noise;
  r.quantum = config.run.quantum;
  r.timings = moment_timings(series, r.scale);

  if (auto const liouville = latest_snapshot(path, Frame::kLiouville)) {
    Snapshot const s = read_snapshot(*liouville);
    r.boundary_mass = boundary_mass_fraction(s.field.grid, s.field.values);
  }
  std::optional<WignerField> lab;
  if (auto const p = latest_snapshot(path, Frame::kLab)) {
    lab = read_snapshot(*p).field;
  } else if (auto const q = latest_snapshot(path, Frame::kLiouville); q && config.resample.enabled) {
    Snapshot const s = read_snapshot(*q);
    auto const steps =
        static_cast<std::size_t>(std::llround(s.field.time / config.stepper.dtau));
    lab = to_lab(s.field, config, steps, &r.interference);
  }
  if (lab) {
    auto const diverged = r.interference.diverged;
    auto const outside = r.interference.outside;
    r.interference = interference_report(*lab, config.noise_floor);
    r.interference.diverged = diverged;
    r.interference.outside = outside;
    out.marginal = position_marginal(*lab);
    out.has_marginal = true;
  }
  return out;
}

std::vector<SweepEntry> write_sweep(
    RunConfig const& base,
    std::vector<std::pair<std::string, std::vector<std::string>>> const& axes,
    fs::path const& dir) {
  std::vector<SweepEntry> entries;
  std::vector<std::vector<std::string>> combos{{}};
  for (auto const& [key, values] : axes) {
    if (values.empty()) throw ParameterError("sweep axis " + key + " has no values");
    std::vector<std::vector<std::string>> next;
    for (auto const& c : combos)
      for (auto const& v : values) {
        auto e = c;
        e.push_back(v);
        next.push_back(std::move(e));
      }
    combos = std::move(next);
  }
  fs::create_directories(dir);
  std::ofstream index(dir / "sweep.csv");
  index << "run";
  for (auto const& a : axes) index << ',' << a.first;
  index << '\n';
  for (std::size_t n = 0; n < combos.size(); ++n) {
    RunConfig c = base;
    for (std::size_t k = 0; k < axes.size(); ++k) set_config_value(c, axes[k].first, combos[n][k]);
    c.validate();
    SweepEntry e{dir / fmt::format("run_{:03}", n), c};
    fs::create_directories(e.dir);
    save_config(e.dir / "config.ini", c);
    index << e.dir.filename().string();
    for (auto const& v : combos[n]) index << ',' << v;
    index << '\n';
    entries.push_back(std::move(e));
  }
  return entries;
}

bool is_sweep_dir(fs::path const& dir) { return fs::is_regular_file(dir / "sweep.csv"); }

SweepSummary analyze_sweep(fs::path const& dir) {
  SweepSummary summary;
  std::vector<fs::path> runs;
  for (auto const& e : fs::directory_iterator(dir))
    if (e.is_directory() && fs::is_regular_file(e.path() / "timeseries.csv"))
      runs.push_back(e.path());
  std::sort(runs.begin(), runs.end());
  for (auto const& run : runs) {
    AnalysisResult const a = analyze_path(run);
    summary.rows.push_back({run, a.report.scale, a.report.noise, a.report.interference.visibility,
                            a.report.interference.fringe_spacing, a.report.interference.status});
  }
  std::map<double, std::vector<SweepSummaryRow const*>> by_scale;
  for (auto const& r : summary.rows) by_scale[r.scale].push_back(&r);
  for (auto& [scale, rows] : by_scale) {
    std::sort(rows.begin(), rows.end(), [](auto a, auto b) { return a->noise < b->noise; });
    for (std::size_t k = 1; k < rows.size(); ++k)
      if (rows[k]->visibility > rows[k - 1]->visibility) summary.monotone = false;
  }
  return summary;
}

std::string SweepSummary::to_json() const {
  json rows_json = json::array();
  for (auto const& r : rows)
    rows_json.push_back({{"run", r.dir.filename().string()},
                         {"scale", r.scale},
                         {"noise_rate", r.noise},
                         {"visibility", r.visibility},
                         {"fringe_spacing", r.fringe_spacing},
                         {"status", r.status}});
  json j = {{"runs", rows_json}, {"visibility_monotone_in_noise", monotone}};
  return j.dump(2);
}

std::optional<double> half_visibility_noise(std::vector<std::pair<double, double>> points) {
  std::sort(points.begin(), points.end());
  if (points.size() < 2 || points.front().first != 0.0)
    throw ParameterError("half-visibility search needs a noise-free reference point");
  double const target = 0.5 * points.front().second;
  for (std::size_t k = 1; k < points.size(); ++k) {
    auto const [n1, v1] = points[k];
    if (v1 > target) continue;
    auto const [n0, v0] = points[k - 1];
    double const f = (v0 - target) / (v0 - v1);
    if (n0 <= 0.0) return n1 * f;
    return std::exp(std::log(n0) + f * (std::log(n1) - std::log(n0)));
  }
  return std::nullopt;
}

}  // namespace qxpanse
