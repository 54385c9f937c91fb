#include "qxpanse/flow.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>

#include "qxpanse/error.hpp"
#include "qxpanse/parallel.hpp"

namespace qxpanse {

bool FlowState::finite() const {
  double const all[] = {x,     x_x,   x_p,   x_xx,  x_xp,  x_pp,  x_xxx,
                        x_xxp, x_xpp, x_ppp, p,     p_x,   p_p,   p_xx,
                        p_xp,  p_pp,  p_xxx, p_xxp, p_xpp, p_ppp};
  return std::all_of(std::begin(all), std::end(all),
                     [](double a) { return std::isfinite(a); });
}

FlowState hierarchy_rhs(FlowState const& s, DimensionlessParams const& params) {
  MomentumRates const r = momentum_rates(s, params);
  FlowState d;
  d.x = s.p;
  d.x_x = s.p_x;
  d.x_p = s.p_p;
  d.x_xx = s.p_xx;
  d.x_xp = s.p_xp;
  d.x_pp = s.p_pp;
  d.x_xxx = s.p_xxx;
  d.x_xxp = s.p_xxp;
  d.x_xpp = s.p_xpp;
  d.x_ppp = s.p_ppp;
  d.p = r.p;
  d.p_x = r.p_x;
  d.p_p = r.p_p;
  d.p_xx = r.p_xx;
  d.p_xp = r.p_xp;
  d.p_pp = r.p_pp;
  d.p_xxx = r.p_xxx;
  d.p_xxp = r.p_xxp;
  d.p_xpp = r.p_xpp;
  d.p_ppp = r.p_ppp;
  return d;
}

FlowField::FlowField(PhaseGrid const& grid) : grid_(grid) {
  grid_.validate();
  states_.resize(grid.size());
  for (std::size_t i = 0; i < grid.nx; ++i)
    for (std::size_t j = 0; j < grid.np; ++j)
      states_[grid.index(i, j)] = FlowState::at(grid.u(i), grid.v(j));
}

namespace {

bool escaped(double u, double v) {
  return !(std::abs(u) <= kDivergenceCutoff) || !(std::abs(v) <= kDivergenceCutoff);
}

}  // namespace

void propagate_field(FlowField& field, DimensionlessParams const& params, double dtau,
                     std::size_t n_steps, int threads) {
  if (n_steps == 0) return;
  auto states = field.states();
  std::atomic<std::size_t> first_bad{std::numeric_limits<std::size_t>::max()};
  parallel_for(states.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      FlowState& s = states[k];
      for (std::size_t n = 0; n < n_steps; ++n) yoshida_step(s, params, dtau);
      if (escaped(s.x, s.p) || !s.finite()) {
        std::size_t expected = first_bad.load();
        while (k < expected && !first_bad.compare_exchange_weak(expected, k)) {
        }
      }
    }
  });
  double const t_end = field.time() + dtau * static_cast<double>(n_steps);
  if (std::size_t const bad = first_bad.load(); bad != std::numeric_limits<std::size_t>::max()) {
    throw DivergenceError("classical trajectory diverged at grid index " +
                          std::to_string(bad) + " (i=" +
                          std::to_string(bad / field.grid().np) + ", j=" +
                          std::to_string(bad % field.grid().np) + ") by tau=" +
                          std::to_string(t_end));
  }
  field.set_time(t_end);
}

std::pair<double, double> forward_point(double u, double v,
                                        DimensionlessParams const& params, double tau,
                                        std::size_t n_steps) {
  if (n_steps == 0 || tau == 0.0) return {u, v};
  double const h = tau / static_cast<double>(n_steps);
  for (std::size_t n = 0; n < n_steps; ++n) {
    yoshida_point_step(u, v, params, h);
    if (escaped(u, v))
      throw DivergenceError("trajectory from (" + std::to_string(u) + ", " +
                            std::to_string(v) + ") diverged at step " +
                            std::to_string(n) + " of " + std::to_string(n_steps));
  }
  return {u, v};
}

std::pair<double, double> backward_point(double u, double v,
                                         DimensionlessParams const& params, double tau,
                                         std::size_t n_steps) {
  if (tau < 0.0) throw ParameterError("backward propagation time must be non-negative");
  return forward_point(u, v, params, -tau, n_steps);
}

std::size_t backward_points(std::span<double> u, std::span<double> v,
                            DimensionlessParams const& params, double tau,
                            std::size_t n_steps, int threads) {
  if (u.size() != v.size()) throw ParameterError("coordinate spans differ in length");
  if (tau < 0.0) throw ParameterError("backward propagation time must be non-negative");
  if (n_steps == 0 || tau == 0.0) return 0;
  using C = YoshidaCoefficients;
  double const h = -tau / static_cast<double>(n_steps);
  double const d[4] = {C::drift[0] * h, C::drift[1] * h, C::drift[2] * h, C::drift[3] * h};
  double const kk[3] = {C::kick[0] * h, C::kick[1] * h, C::kick[2] * h};
  // Force polynomial 2 * V'(u) in Horner form.
  auto const& c = params.potential.coefficients();
  double const f0 = 2.0 * c[0], f1 = 4.0 * c[1], f2 = 6.0 * c[2], f3 = 8.0 * c[3];

  std::atomic<std::size_t> diverged{0};
  parallel_for(u.size(), threads, [&](std::size_t begin, std::size_t end) {
    constexpr std::size_t kBlock = 512;
    std::size_t local = 0;
    for (std::size_t b = begin; b < end; b += kBlock) {
      std::size_t const e = std::min(end, b + kBlock);
      double* __restrict uu = u.data() + b;
      double* __restrict vv = v.data() + b;
      std::size_t const m = e - b;
      for (std::size_t n = 0; n < n_steps; ++n) {
        for (int stage = 0; stage < 3; ++stage) {
          double const ds = d[stage], ks = kk[stage];
          for (std::size_t q = 0; q < m; ++q) {
            double const x = uu[q] + ds * vv[q];
            uu[q] = x;
            vv[q] -= ks * (f0 + x * (f1 + x * (f2 + x * f3)));
          }
        }
        double const ds = d[3];
        for (std::size_t q = 0; q < m; ++q) uu[q] += ds * vv[q];
      }
      for (std::size_t q = 0; q < m; ++q) {
        if (escaped(uu[q], vv[q])) {
          uu[q] = std::numeric_limits<double>::quiet_NaN();
          vv[q] = std::numeric_limits<double>::quiet_NaN();
          ++local;
        }
      }
    }
    diverged += local;
  });
  return diverged.load();
}

}  // namespace qxpanse
