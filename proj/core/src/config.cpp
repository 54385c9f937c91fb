#include "qxpanse/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <vector>

#include "qxpanse/error.hpp"

extern char** environ;

namespace qxpanse {

namespace {

std::string trim(std::string const& s) {
  auto const b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto const e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(std::string const& key, std::string const& text) {
  auto const s = trim(text);
  double v = 0.0;
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParameterError(fmt::format("{}: '{}' is not a number", key, s));
  return v;
}

std::size_t parse_size(std::string const& key, std::string const& text) {
  auto const s = trim(text);
  std::size_t v = 0;
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParameterError(fmt::format("{}: '{}' is not a non-negative integer", key, s));
  return v;
}

bool parse_bool(std::string const& key, std::string const& text) {
  auto const s = trim(text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ParameterError(fmt::format("{}: '{}' is not a boolean", key, s));
}

struct Field {
  char const* section;
  char const* key;
  std::function<std::string(RunConfig const&)> get;
  std::function<void(RunConfig&, std::string const&, std::string const&)> set;
};

#define QX_DOUBLE(sec, name, expr)                                                    \
  Field{sec, name, [](RunConfig const& c) { return fmt::format("{}", c.expr); },       \
        [](RunConfig& c, std::string const& k, std::string const& v) {                 \
          c.expr = parse_double(k, v);                                                 \
        }}
#define QX_SIZE(sec, name, expr)                                                      \
  Field{sec, name, [](RunConfig const& c) { return fmt::format("{}", c.expr); },       \
        [](RunConfig& c, std::string const& k, std::string const& v) {                 \
          c.expr = parse_size(k, v);                                                   \
        }}
#define QX_BOOL(sec, name, expr)                                                      \
  Field{sec, name,                                                                     \
        [](RunConfig const& c) { return std::string(c.expr ? "true" : "false"); },     \
        [](RunConfig& c, std::string const& k, std::string const& v) {                 \
          c.expr = parse_bool(k, v);                                                   \
        }}

std::vector<Field> const& fields() {
  static std::vector<Field> const table = {
      Field{"potential", "preset", [](RunConfig const& c) { return c.potential.preset; },
            [](RunConfig& c, std::string const& k, std::string const& v) {
              auto const s = trim(v);
              if (s != "harmonic" && s != "quartic" && s != "custom")
                throw ParameterError(
                    fmt::format("{}: '{}' is not harmonic|quartic|custom", k, s));
              c.potential.preset = s;
            }},
      QX_DOUBLE("potential", "eta", potential.eta),
      QX_DOUBLE("potential", "c1", potential.c[0]),
      QX_DOUBLE("potential", "c2", potential.c[1]),
      QX_DOUBLE("potential", "c3", potential.c[2]),
      QX_DOUBLE("potential", "c4", potential.c[3]),
      QX_DOUBLE("noise", "gamma", gamma),
      QX_DOUBLE("noise", "noise_rate", noise),
      QX_SIZE("grid", "nx", grid.nx),
      QX_SIZE("grid", "np", grid.np),
      QX_DOUBLE("grid", "hx", grid.hx),
      QX_DOUBLE("grid", "hp", grid.hp),
      QX_DOUBLE("grid", "center_x", grid.center_x),
      QX_DOUBLE("grid", "center_p", grid.center_p),
      QX_DOUBLE("initial", "mean_x", initial.mean_x),
      QX_DOUBLE("initial", "mean_p", initial.mean_p),
      QX_DOUBLE("initial", "sigma_x", initial.sigma_x),
      QX_DOUBLE("initial", "sigma_p", initial.sigma_p),
      QX_DOUBLE("stepper", "dtau", stepper.dtau),
      QX_SIZE("stepper", "flow_substeps", stepper.flow_substeps),
      QX_DOUBLE("stepper", "tolerance", stepper.tolerance),
      Field{"stepper", "evaluation",
            [](RunConfig const& c) {
              return std::string(c.stepper.evaluation == EvaluationPoint::kStart ? "start"
                                                                                 : "midpoint");
            },
            [](RunConfig& c, std::string const& k, std::string const& v) {
              auto const s = trim(v);
              if (s == "start")
                c.stepper.evaluation = EvaluationPoint::kStart;
              else if (s == "midpoint")
                c.stepper.evaluation = EvaluationPoint::kMidpoint;
              else
                throw ParameterError(fmt::format("{}: '{}' is not start|midpoint", k, s));
            }},
      QX_SIZE("stepper", "term_cap", stepper.term_cap),
      Field{"stepper", "threads",
            [](RunConfig const& c) { return fmt::format("{}", c.stepper.threads); },
            [](RunConfig& c, std::string const& k, std::string const& v) {
              auto const n = parse_size(k, v);
              if (n == 0 || n > 1024) throw ParameterError(k + ": must be in 1..1024");
              c.stepper.threads = static_cast<int>(n);
            }},
      QX_DOUBLE("run", "t_final", run.t_final),
      QX_SIZE("run", "snapshot_every", run.snapshot_every),
      QX_SIZE("run", "series_every", run.series_every),
      Field{"run", "frame", [](RunConfig const& c) { return std::string(to_string(c.run.frame)); },
            [](RunConfig& c, std::string const& k, std::string const& v) {
              auto const s = trim(v);
              if (s == "liouville")
                c.run.frame = FrameSelection::kLiouville;
              else if (s == "lab")
                c.run.frame = FrameSelection::kLab;
              else if (s == "both")
                c.run.frame = FrameSelection::kBoth;
              else
                throw ParameterError(fmt::format("{}: '{}' is not liouville|lab|both", k, s));
            }},
      Field{"run", "mode",
            [](RunConfig const& c) { return std::string(c.run.quantum ? "quantum" : "classical"); },
            [](RunConfig& c, std::string const& k, std::string const& v) {
              auto const s = trim(v);
              if (s == "quantum")
                c.run.quantum = true;
              else if (s == "classical")
                c.run.quantum = false;
              else
                throw ParameterError(fmt::format("{}: '{}' is not quantum|classical", k, s));
            }},
      QX_BOOL("run", "mapped_grid", run.mapped_grid),
      QX_DOUBLE("run", "norm_drift_bound", run.norm_drift_bound),
      QX_BOOL("resample", "enabled", resample.enabled),
      QX_SIZE("resample", "nx", resample.nx),
      QX_SIZE("resample", "np", resample.np),
      QX_DOUBLE("resample", "x_half_width", resample.x_half_width),
      QX_DOUBLE("resample", "p_half_width", resample.p_half_width),
      QX_DOUBLE("analysis", "noise_floor", noise_floor),
  };
  return table;
}

#undef QX_DOUBLE
#undef QX_SIZE
#undef QX_BOOL

Field const& find_field(std::string const& section, std::string const& key) {
  for (auto const& f : fields())
    if (section == f.section && key == f.key) return f;
  throw ParameterError(fmt::format("unknown configuration key '{}.{}'", section, key));
}

void require(bool ok, std::string const& message) {
  if (!ok) throw ParameterError(message);
}

}  // namespace

char const* to_string(FrameSelection frame) {
  switch (frame) {
    case FrameSelection::kLiouville:
      return "liouville";
    case FrameSelection::kLab:
      return "lab";
    case FrameSelection::kBoth:
      return "both";
  }
  return "both";
}

Potential PotentialSpec::build() const {
  if (preset == "harmonic") return Potential::harmonic();
  if (preset == "quartic") return Potential::quartic(eta);
  return Potential(c);
}

DimensionlessParams RunConfig::params() const {
  DimensionlessParams p;
  p.gamma = gamma;
  p.noise = noise;
  p.potential = potential.build();
  p.quantum = run.quantum;
  return p;
}

PhaseGrid RunConfig::phase_grid() const {
  return PhaseGrid::centered(grid.nx, grid.np, grid.hx, grid.hp, grid.center_x,
                             grid.center_p);
}

PhaseGrid RunConfig::resample_grid() const {
  double const xw =
      resample.x_half_width > 0.0 ? resample.x_half_width : std::max(1.5 * potential.scale(), 6.0);
  double const hx = 2.0 * xw / static_cast<double>(resample.nx - 1);
  double const hp = 2.0 * resample.p_half_width / static_cast<double>(resample.np - 1);
  return PhaseGrid::centered(resample.nx, resample.np, hx, hp);
}

std::size_t RunConfig::total_steps() const {
  return static_cast<std::size_t>(std::llround(run.t_final / stepper.dtau));
}

void RunConfig::validate() const {
  require(potential.preset != "quartic" || (std::isfinite(potential.eta) && potential.eta > 0.0),
          "potential.eta must be positive");
  for (double c : potential.c) require(std::isfinite(c), "potential.c1..c4 must be finite");
  require(std::isfinite(gamma) && gamma >= 0.0, "noise.gamma must be non-negative");
  require(std::isfinite(noise) && noise >= 0.0, "noise.noise_rate must be non-negative");
  require(grid.nx >= 8 && grid.np >= 8, "grid.nx and grid.np must be at least 8");
  require(std::isfinite(grid.hx) && grid.hx > 0.0 && std::isfinite(grid.hp) && grid.hp > 0.0,
          "grid.hx and grid.hp must be positive");
  require(std::isfinite(grid.center_x) && std::isfinite(grid.center_p),
          "grid centre must be finite");
  require(std::isfinite(initial.mean_x) && std::isfinite(initial.mean_p),
          "initial means must be finite");
  require(initial.sigma_x > 0.0 && initial.sigma_p > 0.0, "initial widths must be positive");
  require(std::isfinite(run.t_final) && run.t_final >= 0.0, "run.t_final must be non-negative");
  require(run.norm_drift_bound >= 0.0, "run.norm_drift_bound must be non-negative");
  require(run.series_every >= 1, "run.series_every must be at least 1");
  require(resample.nx >= 8 && resample.np >= 8, "resample.nx and resample.np must be at least 8");
  require(resample.x_half_width >= 0.0 && resample.p_half_width > 0.0,
          "resample half widths must be positive");
  require(noise_floor >= 0.0 && noise_floor < 1.0, "analysis.noise_floor must be in [0, 1)");
  stepper.validate();
  double const steps = run.t_final / stepper.dtau;
  require(std::abs(steps - std::round(steps)) < 1e-9 * std::max(1.0, steps),
          "run.t_final must be a whole number of stepper.dtau steps");
}

bool RunConfig::operator==(RunConfig const& other) const {
  for (auto const& f : fields())
    if (f.get(*this) != f.get(other)) return false;
  return true;
}

RunConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (pt::ini_parser_error const& e) {
    throw ParameterError(fmt::format("config line {}: {}", e.line(), e.message()));
  }
  RunConfig config;
  for (auto const& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ParameterError(fmt::format("config key '{}' is outside any section", section));
    for (auto const& [key, value] : body) {
      auto const& f = find_field(section, key);
      f.set(config, section + "." + key, value.data());
    }
  }
  return config;
}

RunConfig load_config(std::filesystem::path const& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config " + path.string());
  return parse_config(in);
}

void write_config(std::ostream& out, RunConfig const& config) {
  std::string section;
  for (auto const& f : fields()) {
    if (section != f.section) {
      if (!section.empty()) out << '\n';
      section = f.section;
      out << '[' << section << "]\n";
    }
    out << f.key << " = " << f.get(config) << '\n';
  }
}

void save_config(std::filesystem::path const& path, RunConfig const& config) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_config(out, config);
}

void set_config_value(RunConfig& config, std::string const& dotted_key, std::string const& value) {
  auto const dot = dotted_key.find('.');
  if (dot == std::string::npos)
    throw ParameterError("expected section.key, got '" + dotted_key + "'");
  auto const& f = find_field(dotted_key.substr(0, dot), dotted_key.substr(dot + 1));
  f.set(config, dotted_key, value);
}

std::map<std::string, std::string> environment_overrides() {
  std::map<std::string, std::string> out;
  std::string const prefix = kEnvPrefix;
  for (char** e = environ; e && *e; ++e) {
    std::string entry(*e);
    if (entry.rfind(prefix, 0) != 0) continue;
    auto const eq = entry.find('=');
    if (eq == std::string::npos) continue;
    std::string name = entry.substr(prefix.size(), eq - prefix.size());
    auto const us = name.find('_');
    if (us == std::string::npos) continue;
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    out[name.substr(0, us) + "." + name.substr(us + 1)] = entry.substr(eq + 1);
  }
  return out;
}

void apply_overrides(RunConfig& config, std::map<std::string, std::string> const& overrides) {
  for (auto const& [key, value] : overrides) set_config_value(config, key, value);
}

}  // namespace qxpanse
