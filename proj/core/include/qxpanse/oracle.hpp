#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "qxpanse/observables.hpp"
#include "qxpanse/stepper.hpp"
#include "qxpanse/units.hpp"

// Independent reference solvers. None of these share code paths with the
// Liouville-frame pipeline beyond the potential polynomial and the Yoshida
// point step used by the classical ensemble.
namespace qxpanse::oracle {

struct WaveFunction {
  double x0 = 0.0;  // u of sample 0
  double dx = 1.0;
  std::vector<std::complex<double>> psi;
  double time = 0.0;

  std::size_t size() const { return psi.size(); }
  double x(std::size_t i) const { return x0 + static_cast<double>(i) * dx; }
  double norm() const;

  // Gaussian packet with position width sigma_x (zpf units), minimum
  // uncertainty, on `points` samples spanning [-half_width, half_width).
  static WaveFunction gaussian(std::size_t points, double half_width, double mean_x = 0.0,
                               double mean_p = 0.0, double sigma_x = 1.0);
  // First excited state of the unit-frequency harmonic oscillator.
  static WaveFunction harmonic_first_excited(std::size_t points, double half_width);
};

struct WaveMoments {
  double mean_x = 0.0, mean_p = 0.0, x2 = 0.0, p2 = 0.0, xp_sym = 0.0;
};

// Position moments from |psi|^2, momentum moments spectrally.
WaveMoments wave_moments(WaveFunction const& wf);

// Probability density |psi(x)|^2 in units of 1 / x_zpf.
std::vector<double> position_density(WaveFunction const& wf);

// Fraction of spectral weight with |k| above 3/4 of the Nyquist wavenumber.
double spectral_tail_mass(WaveFunction const& wf);

inline constexpr double kAliasingThreshold = 1e-8;

// Strang splitting: half kick, kinetic step in the Fourier basis, half kick.
// Closed systems only. Throws ResolutionError when the spectral tail exceeds
// kAliasingThreshold after the run.
void split_operator_evolve(WaveFunction& wf, Potential const& potential, double dtau,
                           std::size_t steps);

// W(x, p) = (1 / pi hbar) int psi*(x + y) psi(x - y) exp(2 i p y / hbar) dy,
// one DFT over y per column. Columns are taken every `column_stride` samples;
// the momentum axis has `momentum_points` samples (power of two).
WignerField wigner_transform(WaveFunction const& wf, std::size_t momentum_points,
                             std::size_t column_stride = 1);

struct GaussianMoments {
  double mean_x = 0.0, mean_p = 0.0;
  double var_x = 1.0, var_p = 1.0, cov_xp = 0.0;  // central, cov = <{dx,dp}>/2

  Moments as_moments() const;
};

// Moment equations for quadratic potentials with damping and diffusion,
// integrated with an adaptive Runge-Kutta-Fehlberg 7(8) scheme.
GaussianMoments gaussian_moment_ode(DimensionlessParams const& params,
                                    GaussianMoments const& initial, double tau,
                                    double tolerance = 1e-12);

// Stationary point of the moment equations (requires gamma > 0).
GaussianMoments gaussian_steady_state(DimensionlessParams const& params);

struct EnsembleEstimate {
  Moments moments;
  double se_x2 = 0.0, se_p2 = 0.0, se_xp = 0.0, se_mean_x = 0.0, se_mean_p = 0.0;
};

struct GaussianSampler {
  double mean_x = 0.0, mean_p = 0.0, sigma_x = 1.0, sigma_p = 1.0;
  std::uint64_t seed = 1;
};

std::vector<std::pair<double, double>> sample_gaussian(GaussianSampler const& sampler,
                                                       std::size_t count);

// Propagates samples with the Yoshida point step and reports ensemble moments.
EnsembleEstimate classical_ensemble(std::vector<std::pair<double, double>> samples,
                                    DimensionlessParams const& params, double dtau,
                                    std::size_t steps);

}  // namespace qxpanse::oracle
