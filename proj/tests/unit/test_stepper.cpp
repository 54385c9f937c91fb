#include <cmath>
#include <vector>

#include <doctest.h>

#include "property.hpp"
#include "reference.hpp"
#include "qxpanse/error.hpp"
#include "qxpanse/scenario.hpp"
#include "qxpanse/stepper.hpp"

using namespace qxpanse;


TEST_CASE("expmv: matches a dense exponential") {
  qxtest::for_all(8, [](qxtest::Gen& gen) {
    PhaseGrid const grid = PhaseGrid::centered(6, 5, gen.uniform(0.3, 1.0), gen.uniform(0.3, 1.0));
    std::vector<GCoeffs> g(grid.size());
    for (auto& c : g) {
      c.g00 = 0.1 * gen.normal();
      c.g10 = gen.normal();
      c.g01 = gen.normal();
      c.g20 = std::abs(gen.normal()) * 0.2;
      c.g02 = std::abs(gen.normal()) * 0.2;
      c.g11 = 0.1 * gen.normal();
      c.g30 = 0.05 * gen.normal();
      c.g03 = 0.05 * gen.normal();
      c.g21 = 0.05 * gen.normal();
      c.g12 = 0.05 * gen.normal();
    }
    SparseOperator const op = assemble_operator(grid, g);
    std::vector<double> w(grid.size());
    for (auto& a : w) a = gen.normal();
    double const dtau = gen.uniform(0.01, 0.5);
    auto const y = expmv(op, w, dtau, 1e-14);
    CHECK(qxtest::dense_exp_error(op, w, dtau, y) < 1e-10);
  });
}

TEST_CASE("expmv: zero operator is the identity and stats are reported") {
  PhaseGrid const grid = PhaseGrid::centered(5, 5, 1.0, 1.0);
  std::vector<GCoeffs> g(grid.size());
  SparseOperator const zero = assemble_operator(grid, g);
  std::vector<double> w(grid.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = static_cast<double>(k);
  ExpmvStats stats;
  CHECK(expmv(zero, w, 0.3, 1e-12, 60, 1, &stats) == w);
  CHECK(stats.matvecs == 0);

  for (auto& c : g) c.g00 = 0.5;
  SparseOperator const diag = assemble_operator(grid, g);
  auto const y = expmv(diag, w, 2.0, 1e-13, 60, 1, &stats);
  for (std::size_t k = 0; k < w.size(); ++k) CHECK(y[k] == doctest::Approx(w[k] * std::exp(1.0)));
  CHECK(stats.slices >= 1);
}

TEST_CASE("expmv: a slice that cannot converge raises StepTooLargeError") {
  PhaseGrid const grid = PhaseGrid::centered(5, 5, 1.0, 1.0);
  std::vector<GCoeffs> g(grid.size());
  for (auto& c : g) c.g10 = 1.0;
  SparseOperator const op = assemble_operator(grid, g);
  std::vector<double> w(grid.size(), 0.0);
  w[3] = 1.0;
  CHECK_THROWS_AS(expmv(op, w, 1.0, 1e-12, 2), StepTooLargeError);
}

TEST_CASE("stepper: harmonic closed system leaves the field bit-identical") {
  DimensionlessParams params;
  params.potential = Potential::harmonic();
  PhaseGrid const grid = PhaseGrid::centered(32, 32, 0.4, 0.4);
  WignerField const w0 = gaussian_initial(grid, InitialSpec{0.5, -0.3, 1.0, 1.0});
  StepperConfig cfg;
  cfg.dtau = 0.1;
  cfg.flow_substeps = 1;
  Simulation sim(params, w0, cfg);
  for (int k = 0; k < 50; ++k) {
    advance(sim);
    CHECK(sim.last_operator().inf_norm() == 0.0);
  }
  CHECK(sim.wigner().values == w0.values);
  CHECK(sim.time() == doctest::Approx(5.0));
}

TEST_CASE("stepper: configuration validation") {
  StepperConfig c;
  c.dtau = -1.0;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c = {};
  c.evaluation = EvaluationPoint::kMidpoint;
  c.flow_substeps = 3;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c.flow_substeps = 4;
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("stepper: results do not depend on the thread count") {
  DimensionlessParams params;
  params.potential = Potential::quartic(3.0);
  params.noise = 0.01;
  PhaseGrid const grid = PhaseGrid::centered(24, 24, 0.3, 0.3);
  WignerField const w0 = gaussian_initial(grid, InitialSpec{});
  StepperConfig one;
  one.flow_substeps = 2;
  StepperConfig three = one;
  three.threads = 3;
  Simulation a(params, w0, one), b(params, w0, three);
  for (int k = 0; k < 10; ++k) {
    advance(a);
    advance(b);
  }
  CHECK(a.wigner().values == b.wigner().values);
}
