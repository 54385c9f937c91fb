#include "qxpanse/oracle.hpp"

#include <fftw3.h>

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "qxpanse/error.hpp"
#include "qxpanse/flow.hpp"

namespace qxpanse::oracle {

namespace {

using cplx = std::complex<double>;

// In-place complex DFT of fixed length.
class Fft {
 public:
  explicit Fft(std::size_t n) : n_(n) {
    buf_ = fftw_alloc_complex(n);
    if (!buf_) throw std::bad_alloc();
    fwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }
  Fft(Fft const&) = delete;
  Fft& operator=(Fft const&) = delete;

  cplx* data() { return reinterpret_cast<cplx*>(buf_); }
  void forward() { fftw_execute(fwd_); }
  // Unnormalized; caller divides by n.
  void backward() { fftw_execute(bwd_); }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  fftw_complex* buf_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

double wavenumber(std::size_t n, std::size_t m, double dx) {
  auto const signed_n = n < m / 2 ? static_cast<double>(n)
                                  : static_cast<double>(n) - static_cast<double>(m);
  return 2.0 * std::numbers::pi * signed_n / (static_cast<double>(m) * dx);
}

void require_power_of_two(std::size_t n, char const* what) {
  if (n < 2 || (n & (n - 1)) != 0)
    throw ParameterError(std::string(what) + " must be a power of two");
}

}  // namespace

double WaveFunction::norm() const {
  double acc = 0.0;
  for (auto const& a : psi) acc += std::norm(a);
  return acc * dx;
}

WaveFunction WaveFunction::gaussian(std::size_t points, double half_width, double mean_x,
                                    double mean_p, double sigma_x) {
  require_power_of_two(points, "wavefunction sample count");
  WaveFunction wf;
  wf.dx = 2.0 * half_width / static_cast<double>(points);
  wf.x0 = -half_width;
  wf.psi.resize(points);
  double const amp = std::pow(2.0 * std::numbers::pi * sigma_x * sigma_x, -0.25);
  for (std::size_t i = 0; i < points; ++i) {
    double const d = wf.x(i) - mean_x;
    // p = hbar k with hbar = 2.
    wf.psi[i] = amp * std::exp(-d * d / (4.0 * sigma_x * sigma_x)) *
                std::exp(cplx(0.0, mean_p * wf.x(i) / kHbar));
  }
  return wf;
}

WaveFunction WaveFunction::harmonic_first_excited(std::size_t points, double half_width) {
  WaveFunction wf = gaussian(points, half_width);
  // psi_1 = x / sigma * psi_0 with sigma = x_zpf = 1.
  for (std::size_t i = 0; i < points; ++i) wf.psi[i] *= wf.x(i);
  return wf;
}

WaveMoments wave_moments(WaveFunction const& wf) {
  std::size_t const m = wf.size();
  WaveMoments out;
  double w = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double const rho = std::norm(wf.psi[i]);
    w += rho;
    out.mean_x += rho * wf.x(i);
    out.x2 += rho * wf.x(i) * wf.x(i);
  }
  out.mean_x /= w;
  out.x2 /= w;

  Fft fft(m);
  std::copy(wf.psi.begin(), wf.psi.end(), fft.data());
  fft.forward();
  double spec = 0.0;
  std::vector<cplx> dpsi(m);
  for (std::size_t n = 0; n < m; ++n) {
    double const k = wavenumber(n, m, wf.dx);
    double const p = kHbar * k;
    double const s = std::norm(fft.data()[n]);
    spec += s;
    out.mean_p += s * p;
    out.p2 += s * p * p;
    fft.data()[n] *= cplx(0.0, k) / static_cast<double>(m);
  }
  out.mean_p /= spec;
  out.p2 /= spec;
  fft.backward();
  // <{x, p}> = 2 Re <psi| x (-i hbar d/dx) |psi>
  cplx acc = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    acc += std::conj(wf.psi[i]) * wf.x(i) * cplx(0.0, -kHbar) * fft.data()[i];
  out.xp_sym = 2.0 * acc.real() / w;
  return out;
}

std::vector<double> position_density(WaveFunction const& wf) {
  std::vector<double> rho(wf.size());
  for (std::size_t i = 0; i < wf.size(); ++i) rho[i] = std::norm(wf.psi[i]);
  return rho;
}

double spectral_tail_mass(WaveFunction const& wf) {
  std::size_t const m = wf.size();
  Fft fft(m);
  std::copy(wf.psi.begin(), wf.psi.end(), fft.data());
  fft.forward();
  double total = 0.0, tail = 0.0;
  for (std::size_t n = 0; n < m; ++n) {
    double const s = std::norm(fft.data()[n]);
    total += s;
    std::size_t const mag = n < m / 2 ? n : m - n;
    if (4 * mag > 3 * (m / 2)) tail += s;
  }
  return total > 0.0 ? tail / total : 0.0;
}

void split_operator_evolve(WaveFunction& wf, Potential const& potential, double dtau,
                           std::size_t steps) {
  std::size_t const m = wf.size();
  require_power_of_two(m, "wavefunction sample count");
  std::vector<cplx> half_kick(m), kinetic(m);
  for (std::size_t i = 0; i < m; ++i) {
    double const energy = 2.0 * potential.value(wf.x(i));
    half_kick[i] = std::exp(cplx(0.0, -0.5 * energy * dtau / kHbar));
  }
  for (std::size_t n = 0; n < m; ++n) {
    double const k = wavenumber(n, m, wf.dx);
    double const p = kHbar * k;
    kinetic[n] = std::exp(cplx(0.0, -0.5 * p * p * dtau / kHbar)) / static_cast<double>(m);
  }
  Fft fft(m);
  cplx* buf = fft.data();
  std::copy(wf.psi.begin(), wf.psi.end(), buf);
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i < m; ++i) buf[i] *= half_kick[i];
    fft.forward();
    for (std::size_t n = 0; n < m; ++n) buf[n] *= kinetic[n];
    fft.backward();
    for (std::size_t i = 0; i < m; ++i) buf[i] *= half_kick[i];
  }
  std::copy(buf, buf + m, wf.psi.begin());
  wf.time += dtau * static_cast<double>(steps);
  if (double const tail = spectral_tail_mass(wf); tail > kAliasingThreshold)
    throw ResolutionError("split-operator spectrum reaches the band edge (tail mass " +
                          std::to_string(tail) + "); refine the x grid");
}

WignerField wigner_transform(WaveFunction const& wf, std::size_t momentum_points,
                             std::size_t column_stride) {
  require_power_of_two(momentum_points, "Wigner momentum sample count");
  if (column_stride == 0) throw ParameterError("column stride must be positive");
  std::size_t const m = wf.size();
  std::size_t const n = momentum_points;
  auto const half = static_cast<std::ptrdiff_t>(n / 2);

  WignerField out;
  out.time = wf.time;
  out.grid.nx = (m + column_stride - 1) / column_stride;
  out.grid.np = n;
  out.grid.hx = wf.dx * static_cast<double>(column_stride);
  out.grid.hp = std::numbers::pi * kHbar / (static_cast<double>(n) * wf.dx);
  out.grid.x0 = wf.x0;
  out.grid.p0 = -static_cast<double>(half) * out.grid.hp;
  out.values.assign(out.grid.size(), 0.0);

  Fft fft(n);
  cplx* buf = fft.data();
  double const scale = wf.dx / (std::numbers::pi * kHbar);
  for (std::size_t col = 0; col < out.grid.nx; ++col) {
    auto const i = static_cast<std::ptrdiff_t>(col * column_stride);
    for (std::ptrdiff_t s = -half; s < half; ++s) {
      std::ptrdiff_t const a = i + s, b = i - s;
      cplx f = 0.0;
      if (a >= 0 && b >= 0 && a < static_cast<std::ptrdiff_t>(m) &&
          b < static_cast<std::ptrdiff_t>(m))
        f = std::conj(wf.psi[static_cast<std::size_t>(a)]) * wf.psi[static_cast<std::size_t>(b)];
      buf[static_cast<std::size_t>((s + static_cast<std::ptrdiff_t>(n)) %
                                   static_cast<std::ptrdiff_t>(n))] = f;
    }
    fft.backward();
    for (std::ptrdiff_t q = -half; q < half; ++q) {
      std::size_t const src = static_cast<std::size_t>(
          (q + static_cast<std::ptrdiff_t>(n)) % static_cast<std::ptrdiff_t>(n));
      out.values[out.grid.index(col, static_cast<std::size_t>(q + half))] =
          scale * buf[src].real();
    }
  }
  return out;
}

Moments GaussianMoments::as_moments() const {
  Moments m;
  m.mean_x = mean_x;
  m.mean_p = mean_p;
  m.x2 = var_x + mean_x * mean_x;
  m.p2 = var_p + mean_p * mean_p;
  m.xp_sym = 2.0 * (cov_xp + mean_x * mean_p);
  m.norm = 1.0;
  return m;
}

GaussianMoments gaussian_moment_ode(DimensionlessParams const& params,
                                    GaussianMoments const& initial, double tau,
                                    double tolerance) {
  if (!params.potential.is_quadratic())
    throw ParameterError("moment equations close only for quadratic potentials");
  // Force on u: -(f0 + k u) with internal potential energy 2 (c1 u + c2 u^2).
  double const f0 = 2.0 * params.potential.coefficient(1);
  double const k = 4.0 * params.potential.coefficient(2);
  double const gamma = params.gamma;
  double const source = 2.0 * params.diffusion();  // hbar^2 Gamma / x_zpf^2

  using State = std::array<double, 5>;
  State y{initial.mean_x, initial.mean_p, initial.var_x, initial.cov_xp, initial.var_p};
  auto rhs = [&](State const& s, State& d, double) {
    d[0] = s[1];
    d[1] = -f0 - k * s[0] - gamma * s[1];
    d[2] = 2.0 * s[3];
    d[3] = s[4] - k * s[2] - gamma * s[3];
    d[4] = -2.0 * k * s[3] - 2.0 * gamma * s[4] + source;
  };
  if (tau > 0.0) {
    namespace ode = boost::numeric::odeint;
    auto stepper =
        ode::make_controlled(tolerance, tolerance, ode::runge_kutta_fehlberg78<State>());
    ode::integrate_adaptive(stepper, rhs, y, 0.0, tau, std::min(tau, 1e-3));
  }
  return {y[0], y[1], y[2], y[4], y[3]};
}

GaussianMoments gaussian_steady_state(DimensionlessParams const& params) {
  if (!params.potential.is_quadratic() || !(params.potential.coefficient(2) > 0.0))
    throw ParameterError("steady state needs a confining quadratic potential");
  if (!(params.gamma > 0.0)) throw ParameterError("steady state needs gamma > 0");
  double const f0 = 2.0 * params.potential.coefficient(1);
  double const k = 4.0 * params.potential.coefficient(2);
  GaussianMoments s;
  s.mean_x = -f0 / k;
  s.mean_p = 0.0;
  s.cov_xp = 0.0;
  s.var_p = params.diffusion() / params.gamma;
  s.var_x = s.var_p / k;
  return s;
}

std::vector<std::pair<double, double>> sample_gaussian(GaussianSampler const& sampler,
                                                       std::size_t count) {
  std::mt19937_64 rng(sampler.seed);
  std::normal_distribution<double> nx(sampler.mean_x, sampler.sigma_x);
  std::normal_distribution<double> np(sampler.mean_p, sampler.sigma_p);
  std::vector<std::pair<double, double>> out(count);
  for (auto& s : out) {
    s.first = nx(rng);
    s.second = np(rng);
  }
  return out;
}

EnsembleEstimate classical_ensemble(std::vector<std::pair<double, double>> samples,
                                    DimensionlessParams const& params, double dtau,
                                    std::size_t steps) {
  if (samples.size() < 2) throw ParameterError("ensemble needs at least two samples");
  for (auto& [u, v] : samples)
    for (std::size_t s = 0; s < steps; ++s) yoshida_point_step(u, v, params, dtau);

  auto const n = static_cast<double>(samples.size());
  auto mean_and_se = [&](auto f) {
    double sum = 0.0, sq = 0.0;
    for (auto const& [u, v] : samples) {
      double const q = f(u, v);
      sum += q;
      sq += q * q;
    }
    double const mean = sum / n;
    double const var = std::max(0.0, (sq - n * mean * mean) / (n - 1.0));
    return std::pair{mean, std::sqrt(var / n)};
  };
  EnsembleEstimate e;
  std::tie(e.moments.mean_x, e.se_mean_x) = mean_and_se([](double u, double) { return u; });
  std::tie(e.moments.mean_p, e.se_mean_p) = mean_and_se([](double, double v) { return v; });
  std::tie(e.moments.x2, e.se_x2) = mean_and_se([](double u, double) { return u * u; });
  std::tie(e.moments.p2, e.se_p2) = mean_and_se([](double, double v) { return v * v; });
  std::tie(e.moments.xp_sym, e.se_xp) =
      mean_and_se([](double u, double v) { return 2.0 * u * v; });
  e.moments.norm = 1.0;
  return e;
}

}  // namespace qxpanse::oracle
