#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "qxpanse/phase_grid.hpp"
#include "qxpanse/stepper.hpp"
#include "qxpanse/units.hpp"

namespace qxpanse {

enum class FrameSelection { kLiouville, kLab, kBoth };

struct PotentialSpec {
  std::string preset = "quartic";  // harmonic | quartic | custom
  double eta = 100.0;
  std::array<double, 4> c{};  // used by the custom preset

  Potential build() const;
  // Length scale used for the scaled observables (eta for quartic, 1 otherwise).
  double scale() const { return preset == "quartic" ? eta : 1.0; }
};

struct GridSpec {
  std::size_t nx = 255;
  std::size_t np = 56;
  double hx = 0.39;
  double hp = 0.16;
  double center_x = 0.0;
  double center_p = 0.0;
};

struct InitialSpec {
  double mean_x = 0.0;
  double mean_p = 0.0;
  double sigma_x = 1.0;
  double sigma_p = 1.0;
};

struct RunSpec {
  double t_final = 150.0;
  std::size_t snapshot_every = 0;  // steps; 0 writes only the first and last
  std::size_t series_every = 1;
  FrameSelection frame = FrameSelection::kBoth;
  bool quantum = true;
  bool mapped_grid = true;
  // Allowed |norm - 1| (plus gamma * t when damped); 0 disables the check.
  double norm_drift_bound = 1e-3;
};

struct ResampleSpec {
  bool enabled = true;
  std::size_t nx = 601;
  std::size_t np = 241;
  double x_half_width = 0.0;  // 0 picks max(1.5 * scale, 6)
  double p_half_width = 6.0;
};

struct RunConfig {
  PotentialSpec potential;
  double gamma = 0.0;  // gamma / Omega
  double noise = 1e-5;  // Gamma / Omega
  GridSpec grid;
  InitialSpec initial;
  StepperConfig stepper;
  RunSpec run;
  ResampleSpec resample;
  double noise_floor = 1e-6;

  DimensionlessParams params() const;
  PhaseGrid phase_grid() const;
  PhaseGrid resample_grid() const;
  std::size_t total_steps() const;

  // Throws ParameterError naming the offending key.
  void validate() const;

  bool operator==(RunConfig const&) const;
};

// Flat "[section] key = value" text.
RunConfig parse_config(std::istream& in);
RunConfig load_config(std::filesystem::path const& path);
void write_config(std::ostream& out, RunConfig const& config);
void save_config(std::filesystem::path const& path, RunConfig const& config);

// Sets "section.key" to a textual value, with the same parsing as files.
void set_config_value(RunConfig& config, std::string const& dotted_key,
                      std::string const& value);

// Environment overrides: QXPANSE_<SECTION>_<KEY>=value (upper case).
inline constexpr char kEnvPrefix[] = "QXPANSE_";
std::map<std::string, std::string> environment_overrides();
void apply_overrides(RunConfig& config, std::map<std::string, std::string> const& overrides);

char const* to_string(FrameSelection frame);

}  // namespace qxpanse
