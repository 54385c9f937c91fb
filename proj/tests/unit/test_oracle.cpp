#include <cmath>
#include <numbers>

#include <doctest.h>

#include "property.hpp"
#include "qxpanse/error.hpp"
#include "qxpanse/oracle.hpp"

using namespace qxpanse;
namespace o = qxpanse::oracle;

TEST_CASE("oracle: ground state of the harmonic oscillator is stationary") {
  auto wf = o::WaveFunction::gaussian(256, 10.0);
  auto const before = o::wave_moments(wf);
  o::split_operator_evolve(wf, Potential::harmonic(), 0.01, 300);
  auto const after = o::wave_moments(wf);
  CHECK(wf.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(before.x2 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(before.p2 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(after.x2 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(after.p2 == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("oracle: coherent states follow the classical orbit") {
  qxtest::for_all(5, [](qxtest::Gen& g) {
    double const x0 = g.uniform(-3, 3), p0 = g.uniform(-3, 3), t = g.uniform(0.5, 4.0);
    auto wf = o::WaveFunction::gaussian(512, 16.0, x0, p0);
    auto const steps = static_cast<std::size_t>(t / 0.002);
    o::split_operator_evolve(wf, Potential::harmonic(), t / static_cast<double>(steps), steps);
    auto const m = o::wave_moments(wf);
    CHECK(m.mean_x == doctest::Approx(x0 * std::cos(t) + p0 * std::sin(t)).scale(1.0).epsilon(1e-5));
    CHECK(m.mean_p == doctest::Approx(p0 * std::cos(t) - x0 * std::sin(t)).scale(1.0).epsilon(1e-5));
  });
}

TEST_CASE("oracle: Wigner transforms of the lowest harmonic states") {
  auto const ground = o::WaveFunction::gaussian(256, 10.0);
  auto const w0 = o::wigner_transform(ground, 256);
  CHECK(w0.norm() == doctest::Approx(1.0).epsilon(1e-8));
  double const peak = 1.0 / (std::numbers::pi * kHbar);
  double top = 0.0, bottom = 0.0;
  for (double a : w0.values) {
    top = std::max(top, a);
    bottom = std::min(bottom, a);
  }
  CHECK(top == doctest::Approx(peak).epsilon(1e-6));
  CHECK(bottom > -1e-12);

  auto const excited = o::WaveFunction::harmonic_first_excited(256, 10.0);
  auto const w1 = o::wigner_transform(excited, 256);
  double low = 0.0;
  for (double a : w1.values) low = std::min(low, a);
  CHECK(low == doctest::Approx(-peak).epsilon(1e-6));
}

TEST_CASE("oracle: spectral tail guard") {
  auto wf = o::WaveFunction::gaussian(64, 4.0, 0.0, 0.0, 0.1);
  CHECK(o::spectral_tail_mass(wf) > o::kAliasingThreshold);
  CHECK_THROWS_AS(o::split_operator_evolve(wf, Potential::harmonic(), 0.01, 1), ResolutionError);
}

TEST_CASE("oracle: moment equations reproduce the closed harmonic rotation") {
  DimensionlessParams params;
  params.potential = Potential::harmonic();
  o::GaussianMoments start;
  start.mean_x = 2.0;
  start.var_x = 2.0;
  start.var_p = 0.5;
  auto const m = o::gaussian_moment_ode(params, start, std::numbers::pi / 2);
  CHECK(m.mean_x == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  CHECK(m.mean_p == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(m.var_x == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(m.var_p == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("oracle: open harmonic moments relax to the steady state") {
  DimensionlessParams params;
  params.potential = Potential::harmonic();
  params.gamma = 0.2;
  params.noise = 0.3;
  auto const late = o::gaussian_moment_ode(params, o::GaussianMoments{}, 200.0);
  auto const fixed = o::gaussian_steady_state(params);
  CHECK(late.var_x == doctest::Approx(fixed.var_x).epsilon(1e-8));
  CHECK(late.var_p == doctest::Approx(fixed.var_p).epsilon(1e-8));
  CHECK(late.cov_xp == doctest::Approx(fixed.cov_xp).scale(1.0).epsilon(1e-8));
}

TEST_CASE("oracle: ensemble sampling statistics") {
  o::GaussianSampler s{1.0, -2.0, 1.5, 0.7, 99};
  auto const samples = o::sample_gaussian(s, 40000);
  DimensionlessParams params;
  auto const e = o::classical_ensemble(samples, params, 0.1, 0);
  CHECK(std::abs(e.moments.mean_x - 1.0) < 4 * e.se_mean_x);
  CHECK(std::abs(e.moments.mean_p + 2.0) < 4 * e.se_mean_p);
  CHECK(std::abs(e.moments.x2 - (1.0 + 2.25)) < 4 * e.se_x2);
}
