#include <fmt/format.h>
#include <fmt/os.h>

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "qxpanse/config.hpp"
#include "qxpanse/error.hpp"
#include "qxpanse/io.hpp"
#include "qxpanse/scenario.hpp"
#include "qxpanse/verification.hpp"

namespace fs = std::filesystem;
using namespace qxpanse;

namespace {

enum Exit { kOk = 0, kFailed = 1, kUsage = 2, kRuntime = 3 };

struct RunFlags {
  std::string config;
  std::string out;
  int threads = 0;
  std::size_t snapshot_every = 0;
  std::string frame;
  bool classical = false;
  std::vector<std::string> set;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool need_out) {
  cmd->add_option("--config", f.config, "Configuration file ([section] key = value)");
  auto* out = cmd->add_option("--out", f.out, "Output directory");
  if (need_out) out->required();
  cmd->add_option("--threads", f.threads, "Worker threads")->check(CLI::Range(1, 1024));
  cmd->add_option("--snapshot-every", f.snapshot_every, "Snapshot cadence in steps");
  cmd->add_option("--frame", f.frame, "Snapshot frame")
      ->check(CLI::IsMember({"liouville", "lab", "both"}));
  cmd->add_flag("--classical", f.classical, "Drop the Moyal term (hbar -> 0)");
  cmd->add_option("--set", f.set, "Override section.key=value (repeatable)");
}

RunConfig build_config(RunFlags const& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
  apply_overrides(c, environment_overrides());
  for (auto const& kv : f.set) {
    auto const eq = kv.find('=');
    if (eq == std::string::npos) throw ParameterError("--set expects section.key=value");
    set_config_value(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (f.threads > 0) c.stepper.threads = f.threads;
  if (f.snapshot_every > 0) c.run.snapshot_every = f.snapshot_every;
  if (!f.frame.empty()) set_config_value(c, "run.frame", f.frame);
  if (f.classical) c.run.quantum = false;
  c.validate();
  return c;
}

ProgressFn stderr_progress() {
  return [last = -1](std::size_t step, std::size_t total, double t) mutable {
    int const pct = static_cast<int>(100 * step / std::max<std::size_t>(total, 1));
    if (pct / 10 != last / 10) {
      fmt::print(stderr, "step {}/{} (Omega t = {:.3f})\n", step, total, t);
      last = pct;
    }
  };
}

int cmd_run(RunFlags const& f) {
  RunConfig const c = build_config(f);
  RunResult const r = run_scenario(c, f.out, stderr_progress());
  fmt::print("{}\n", r.report.to_json());
  return kOk;
}

int cmd_analyze(std::string const& path, std::string const& out) {
  std::string text;
  if (is_sweep_dir(path)) {
    text = analyze_sweep(path).to_json();
  } else {
    AnalysisResult const a = analyze_path(path);
    text = a.report.to_json();
    if (!out.empty() && a.has_marginal) {
      auto file = fmt::output_file(fs::path(out).replace_extension(".marginal.csv").string());
      file.print("x_zpf,p_x\n");
      for (std::size_t i = 0; i < a.marginal.x.size(); ++i)
        file.print("{},{}\n", a.marginal.x[i], a.marginal.p[i]);
    }
  }
  if (!out.empty()) std::ofstream(out) << text << '\n';
  fmt::print("{}\n", text);
  return kOk;
}

std::vector<std::string> split_commas(std::string const& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto const comma = s.find(',', start);
    out.push_back(s.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

int cmd_sweep(RunFlags const& f, std::vector<std::string> const& vary, bool run) {
  RunFlags base = f;
  base.out.clear();
  RunConfig const c = build_config(base);
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  for (auto const& v : vary) {
    auto const eq = v.find('=');
    if (eq == std::string::npos) throw ParameterError("--vary expects section.key=v1,v2,...");
    axes.emplace_back(v.substr(0, eq), split_commas(v.substr(eq + 1)));
  }
  auto const entries = write_sweep(c, axes, f.out);
  for (auto const& e : entries) {
    fmt::print("{}\n", e.dir.string());
    if (run) {
      fmt::print(stderr, "running {}\n", e.dir.string());
      run_scenario(e.config, e.dir, stderr_progress());
    }
  }
  if (run) fmt::print("{}\n", analyze_sweep(f.out).to_json());
  return kOk;
}

struct Outcome {
  bool ok = false;
  std::string detail;
};

struct Verdict {
  int failures = 0;
  // A check that throws is reported as a failure carrying the error text.
  template <class F>
  void check(std::string const& name, F&& body) {
    Outcome o;
    try {
      o = body();
    } catch (std::exception const& e) {
      o = {false, e.what()};
    }
    fmt::print("{} {}: {}\n", o.ok ? "PASS" : "FAIL", name, o.detail);
    std::fflush(stdout);
    if (!o.ok) ++failures;
  }
};

int cmd_verify() {
  Verdict v;
  v.check("harmonic closed system leaves W unchanged", [] {
    RunConfig c;
    c.potential.preset = "harmonic";
    c.noise = 0.0;
    c.grid = {64, 64, 0.25, 0.25, 0.0, 0.0};
    c.run.t_final = 5.0;
    c.resample.enabled = false;
    WignerField const w0 = gaussian_initial(c.phase_grid(), c.initial);
    RunResult const r = run_scenario(c);
    return Outcome{r.liouville.values == w0.values,
                   fmt::format("{} steps", c.total_steps())};
  });
  v.check("harmonic open system vs moment equations", [] {
    RunConfig c;
    c.potential.preset = "harmonic";
    c.gamma = 0.05;
    c.noise = 0.5;
    c.grid = {96, 96, 0.5, 0.5, 0.0, 0.0};
    c.initial.mean_x = 3.0;
    c.stepper.flow_substeps = 2;
    c.run.t_final = 5.0;
    auto const m = compare_with_moment_ode(c);
    return Outcome{m.worst() < 1e-2,
                   fmt::format("worst relative moment error {:.3e}", m.worst())};
  });
  v.check("classical mode vs trajectory ensemble", [] {
    RunConfig c;
    c.potential.preset = "quartic";
    c.potential.eta = 3.0;
    c.noise = 0.0;
    c.grid = {96, 96, 0.2, 0.2, 0.0, 0.0};
    c.initial.mean_x = 1.0;
    c.stepper.flow_substeps = 4;
    c.run.t_final = 4.0;
    auto const e = compare_with_ensemble(c, 20000);
    double const z = *std::max_element(e.z.begin(), e.z.end());
    return Outcome{z < 4.0,
                   fmt::format("largest deviation {:.2f} standard errors", z)};
  });
  v.check("quartic closed system vs split-operator oracle", [] {
    RunConfig c;
    c.potential.preset = "quartic";
    c.potential.eta = 5.0;
    c.noise = 0.0;
    c.grid = {128, 128, 0.125, 0.125, 0.0, 0.0};
    c.stepper.flow_substeps = 2;
    c.run.t_final = 2.5;
    c.resample = {true, 601, 201, 15.0, 8.0};
    SplitOperatorSettings s;
    auto const w = compare_with_split_operator(c, s);
    return Outcome{w.moments.worst(2, 5) < 1e-2,
                   fmt::format("worst second-moment error {:.3e}, marginal L1 {:.3e}",
                               w.moments.worst(2, 5), w.marginal_l1)};
  });
  return v.failures == 0 ? kOk : kFailed;
}

int cmd_dump_operator(RunFlags const& f, std::size_t steps) {
  RunConfig const c = build_config(f);
  Simulation sim(c.params(), gaussian_initial(c.phase_grid(), c.initial), c.stepper);
  for (std::size_t s = 0; s < steps; ++s) advance(sim);
  SparseOperator const op = sim.current_operator();
  fmt::print(stderr, "dim {} nnz {} inf-norm {} at Omega t = {}\n", op.dim(), op.nnz(),
             op.inf_norm(), sim.time());
  if (f.out.empty()) {
    op.write_coordinates(std::cout);
  } else {
    std::ofstream out(f.out);
    op.write_coordinates(out);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qxpanse: Wigner-function dynamics in the Liouville frame"};
  app.require_subcommand(1);

  RunFlags run_flags, sweep_flags, dump_flags;
  auto* run = app.add_subcommand("run", "Run one configuration");
  add_run_flags(run, run_flags, true);

  std::string analyze_path_arg, analyze_out;
  auto* analyze = app.add_subcommand("analyze", "Re-analyse a run directory, sweep or snapshot");
  analyze->add_option("path", analyze_path_arg, "Run directory, sweep directory or snapshot")
      ->required();
  analyze->add_option("--out", analyze_out, "Write the JSON report here as well");

  std::vector<std::string> vary;
  bool sweep_run = false;
  auto* sweep = app.add_subcommand("sweep", "Emit one configuration per parameter combination");
  add_run_flags(sweep, sweep_flags, true);
  sweep->add_option("--vary", vary, "section.key=v1,v2,... (repeatable)")->required();
  sweep->add_flag("--run", sweep_run, "Run every emitted configuration");

  auto* verify = app.add_subcommand("verify", "Cross-check the solver against the oracles");

  std::size_t dump_steps = 0;
  auto* dump = app.add_subcommand("dump-operator", "Print D(t) as 'row col value' triples");
  add_run_flags(dump, dump_flags, false);
  dump->add_option("--steps", dump_steps, "Advance this many steps first");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run_flags);
    if (*analyze) return cmd_analyze(analyze_path_arg, analyze_out);
    if (*sweep) return cmd_sweep(sweep_flags, vary, sweep_run);
    if (*verify) return cmd_verify();
    if (*dump) return cmd_dump_operator(dump_flags, dump_steps);
  } catch (ParameterError const& e) {
    fmt::print(stderr, "parameter error: {}\n", e.what());
    return kUsage;
  } catch (FormatError const& e) {
    fmt::print(stderr, "format error at byte {}: {}\n", e.offset(), e.what());
    return kRuntime;
  } catch (std::exception const& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kRuntime;
  }
  return kOk;
}
