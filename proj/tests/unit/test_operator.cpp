#include <cmath>
#include <vector>

#include <doctest.h>

#include "property.hpp"
#include "reference.hpp"
#include "qxpanse/error.hpp"
#include "qxpanse/liouville_operator.hpp"

using namespace qxpanse;

namespace {

GCoeffs random_g(qxtest::Gen& g) {
  GCoeffs c;
  c.g00 = g.normal();
  c.g10 = g.normal();
  c.g01 = g.normal();
  c.g20 = g.normal();
  c.g02 = g.normal();
  c.g11 = g.normal();
  c.g30 = g.normal();
  c.g03 = g.normal();
  c.g21 = g.normal();
  c.g12 = g.normal();
  return c;
}

}  // namespace

TEST_CASE("operator: sparse application equals direct finite differences") {
  qxtest::for_all(40, [](qxtest::Gen& gen) {
    PhaseGrid const grid = PhaseGrid::centered(gen.size(5, 23), gen.size(5, 19),
                                               gen.uniform(0.05, 1.0), gen.uniform(0.05, 1.0));
    std::vector<GCoeffs> g(grid.size());
    std::vector<double> w(grid.size());
    for (auto& c : g) c = random_g(gen);
    for (auto& a : w) a = gen.normal();
    SparseOperator const op = assemble_operator(grid, g, gen.integer(1, 3));
    std::vector<double> y(grid.size());
    op.apply(w, y, gen.integer(1, 3));
    auto const ref = qxtest::apply_directly(grid, g, w);
    double scale = 0.0;
    for (double a : ref) scale = std::max(scale, std::abs(a));
    for (std::size_t k = 0; k < y.size(); ++k) CHECK(std::abs(y[k] - ref[k]) < 1e-12 * scale);
  });
}

TEST_CASE("operator: the two-norm bound dominates the amplification of random vectors") {
  qxtest::for_all(20, [](qxtest::Gen& gen) {
    PhaseGrid const grid = PhaseGrid::centered(12, 9, 0.3, 0.4);
    std::vector<GCoeffs> g(grid.size());
    for (auto& c : g) c = random_g(gen);
    SparseOperator const op = assemble_operator(grid, g);
    std::vector<double> w(grid.size()), y(grid.size());
    for (auto& a : w) a = gen.normal();
    // A few power iterations sharpen the lower estimate of ||D||_2.
    for (int it = 0; it < 30; ++it) {
      op.apply(w, y);
      double n = 0.0;
      for (double a : y) n += a * a;
      n = std::sqrt(n);
      for (std::size_t k = 0; k < w.size(); ++k) w[k] = y[k] / n;
    }
    op.apply(w, y);
    double ratio = 0.0;
    for (double a : y) ratio += a * a;
    CHECK(std::sqrt(ratio) <= op.two_norm_bound() * (1 + 1e-12));
    CHECK(op.two_norm_bound() <= std::max(op.inf_norm(), op.one_norm()) * (1 + 1e-12));
  });
}

TEST_CASE("operator: quadratic closed dynamics give the zero operator") {
  DimensionlessParams params;
  params.potential = Potential::harmonic();
  FlowState s = FlowState::at(0.7, 0.2);
  for (int k = 0; k < 10; ++k) yoshida_step(s, params, 0.1);
  GCoeffs const g = g_coefficients(s, inverse_derivs(s), params);
  double const all[] = {g.g00, g.g10, g.g01, g.g20, g.g02, g.g11, g.g30, g.g03, g.g21, g.g12};
  for (double a : all) CHECK(a == 0.0);
}

TEST_CASE("operator: identity flow reproduces the lab-frame coefficients") {
  DimensionlessParams params;
  params.potential = Potential::quartic(4.0);
  params.gamma = 0.3;
  params.noise = 0.2;
  FlowState const s = FlowState::at(1.5, -0.5);
  GCoeffs const g = g_coefficients(s, inverse_derivs(s), params);
  double const q = params.moyal_prefactor() * params.force_derivs(1.5).d3;
  CHECK(g.g00 == doctest::Approx(0.3));
  CHECK(g.g01 == doctest::Approx(0.3 * -0.5));
  CHECK(g.g02 == doctest::Approx(params.diffusion()));
  CHECK(g.g03 == doctest::Approx(q));
  CHECK(g.g10 == 0.0);
  CHECK(g.g20 == 0.0);
  CHECK(g.g11 == 0.0);
  CHECK(g.g30 == 0.0);
  CHECK(g.g21 == 0.0);
  CHECK(g.g12 == 0.0);
}

TEST_CASE("operator: non-finite coefficients are reported with their index") {
  PhaseGrid const grid = PhaseGrid::centered(6, 6, 0.5, 0.5);
  std::vector<GCoeffs> g(grid.size());
  g[grid.index(2, 3)].g21 = std::nan("");
  CHECK_THROWS_WITH_AS(assemble_operator(grid, g), doctest::Contains("i=2, j=3"),
                       AssemblyError);
}

TEST_CASE("operator: boundary mass fraction") {
  PhaseGrid const grid = PhaseGrid::centered(10, 10, 1.0, 1.0);
  std::vector<double> w(grid.size(), 0.0);
  w[grid.index(5, 5)] = 1.0;
  CHECK(boundary_mass_fraction(grid, w) == 0.0);
  w[grid.index(0, 5)] = 1.0;
  CHECK(boundary_mass_fraction(grid, w) == doctest::Approx(0.5));
}
