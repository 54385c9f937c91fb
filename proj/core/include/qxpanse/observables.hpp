#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qxpanse/flow.hpp"
#include "qxpanse/phase_grid.hpp"
#include "qxpanse/stepper.hpp"
#include "qxpanse/units.hpp"

namespace qxpanse {

// Lab-frame moments in internal units. xp_sym is <{x, p}> = 2 <x p> in units
// of x_zpf p_zpf.
struct Moments {
  double mean_x = 0.0;
  double mean_p = 0.0;
  double x2 = 0.0;
  double p2 = 0.0;
  double xp_sym = 0.0;
  double norm = 0.0;

  // sqrt<x^2> / (eta x_zpf)
  double scaled_x_width(double eta) const;
  // sqrt<p^2> / p_zpf
  double scaled_p_width() const;
  // <{x, p}> / hbar
  double xp_over_hbar() const { return xp_sym / kHbar; }
  // <{x, p}> / (eta hbar)
  double scaled_covariance(double eta) const { return xp_over_hbar() / eta; }
};

// Quadrature through the forward map: <f> = sum f(x_cl, p_cl) W h_x h_p / norm.
Moments moments(WignerField const& w, FlowField const& flow);

// Plain quadrature of a field on its own grid (lab-frame cross-check).
Moments grid_moments(WignerField const& w);

struct GridDensity {
  std::vector<double> lambda_plus;
  std::vector<double> lambda_minus;
  double lambda_min = 1.0;
  std::size_t argmin = 0;
};

// Singular values of a 2x2 matrix, largest first.
std::pair<double, double> singular_values(double a, double b, double c, double d);

// Flow Jacobians are already expressed in zero-point units internally.
GridDensity grid_density(FlowField const& flow);

struct ResampleResult {
  WignerField field;
  std::size_t diverged = 0;
  std::size_t outside = 0;
};

// Bilinear interpolation with zero outside the source lattice.
double interpolate_bilinear(WignerField const& w, double u, double v);

// W(x, p, t) = W~(x_cl(x, p, -t), p_cl(x, p, -t), t) on the target lattice.
// Backward trajectories use n_steps Yoshida steps over the field's time.
ResampleResult resample_lab_frame(WignerField const& w, DimensionlessParams const& params,
                                  std::size_t n_steps, PhaseGrid const& target,
                                  int threads = 1);

struct Marginal {
  std::vector<double> x;  // column positions (u)
  std::vector<double> p;  // P(x) in units of 1 / x_zpf
};

// Trapezoidal integral over momentum for each column.
Marginal position_marginal(WignerField const& lab);

struct Peak {
  double x = 0.0;
  double value = 0.0;
  std::size_t index = 0;
};

struct InterferenceMetrics {
  double fringe_spacing = 0.0;  // x_f
  double visibility = 0.0;
  Peak main_peak;
  Peak neighbor_peak;
  double valley = 0.0;
  std::vector<Peak> peaks;
};

// Local maxima above noise_floor * max, refined by a three-point parabola.
std::vector<Peak> find_peaks(std::span<double const> x, std::span<double const> p,
                             double noise_floor = 1e-6);

// Throws NoInterferenceError when fewer than two peaks are found.
InterferenceMetrics interference_metrics(std::span<double const> x,
                                         std::span<double const> p,
                                         double noise_floor = 1e-6);

}  // namespace qxpanse
