#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "qxpanse/phase_grid.hpp"
#include "qxpanse/units.hpp"

namespace qxpanse {

// Classical trajectory through one initial point together with its derivatives
// with respect to the initial conditions (x0, p0) up to third order. Suffixes
// name the differentiation variables: x_xp = d^2 x_cl / dx0 dp0.
struct FlowState {
  // Position-type components (advanced by drifts).
  double x = 0.0;
  double x_x = 1.0, x_p = 0.0;
  double x_xx = 0.0, x_xp = 0.0, x_pp = 0.0;
  double x_xxx = 0.0, x_xxp = 0.0, x_xpp = 0.0, x_ppp = 0.0;
  // Momentum-type components (advanced by kicks).
  double p = 0.0;
  double p_x = 0.0, p_p = 1.0;
  double p_xx = 0.0, p_xp = 0.0, p_pp = 0.0;
  double p_xxx = 0.0, p_xxp = 0.0, p_xpp = 0.0, p_ppp = 0.0;

  static FlowState at(double u, double v) {
    FlowState s;
    s.x = u;
    s.p = v;
    return s;
  }

  double jacobian_det() const { return x_x * p_p - x_p * p_x; }
  bool finite() const;

  bool operator==(FlowState const&) const = default;
};

inline constexpr std::size_t kFlowComponents = 20;

// Rates of the momentum-type block, i.e. -d/dx0.. of V'(x_cl).
struct MomentumRates {
  double p, p_x, p_p, p_xx, p_xp, p_pp, p_xxx, p_xxp, p_xpp, p_ppp;
};

inline MomentumRates momentum_rates(FlowState const& s, DimensionlessParams const& params) {
  PotentialDerivs const f = params.force_derivs(s.x);
  double const v2 = f.d2, v3 = f.d3, v4 = f.d4;
  MomentumRates r;
  r.p = -f.d1;
  r.p_x = -v2 * s.x_x;
  r.p_p = -v2 * s.x_p;
  r.p_xx = -v3 * s.x_x * s.x_x - v2 * s.x_xx;
  r.p_xp = -v3 * s.x_x * s.x_p - v2 * s.x_xp;
  r.p_pp = -v3 * s.x_p * s.x_p - v2 * s.x_pp;
  r.p_xxx = -v4 * s.x_x * s.x_x * s.x_x - 3.0 * v3 * s.x_x * s.x_xx - v2 * s.x_xxx;
  r.p_ppp = -v4 * s.x_p * s.x_p * s.x_p - 3.0 * v3 * s.x_p * s.x_pp - v2 * s.x_ppp;
  r.p_xxp = -v4 * s.x_x * s.x_x * s.x_p - v3 * s.x_xx * s.x_p -
            2.0 * v3 * s.x_x * s.x_xp - v2 * s.x_xxp;
  r.p_xpp = -v4 * s.x_x * s.x_p * s.x_p - v3 * s.x_x * s.x_pp -
            2.0 * v3 * s.x_p * s.x_xp - v2 * s.x_xpp;
  return r;
}

// Time derivative of every component (unit mass).
FlowState hierarchy_rhs(FlowState const& state, DimensionlessParams const& params);

struct YoshidaCoefficients {
  static inline double const w1 = 1.0 / (2.0 - std::cbrt(2.0));
  static inline double const w0 = -std::cbrt(2.0) / (2.0 - std::cbrt(2.0));
  // drift, kick, drift, kick, drift, kick, drift
  static inline double const drift[4] = {0.5 * w1, 0.5 * (w0 + w1), 0.5 * (w0 + w1),
                                         0.5 * w1};
  static inline double const kick[3] = {w1, w0, w1};
};

namespace detail {

inline void drift(FlowState& s, double h) {
  s.x += h * s.p;
  s.x_x += h * s.p_x;
  s.x_p += h * s.p_p;
  s.x_xx += h * s.p_xx;
  s.x_xp += h * s.p_xp;
  s.x_pp += h * s.p_pp;
  s.x_xxx += h * s.p_xxx;
  s.x_xxp += h * s.p_xxp;
  s.x_xpp += h * s.p_xpp;
  s.x_ppp += h * s.p_ppp;
}

inline void kick(FlowState& s, DimensionlessParams const& params, double h) {
  MomentumRates const r = momentum_rates(s, params);
  s.p += h * r.p;
  s.p_x += h * r.p_x;
  s.p_p += h * r.p_p;
  s.p_xx += h * r.p_xx;
  s.p_xp += h * r.p_xp;
  s.p_pp += h * r.p_pp;
  s.p_xxx += h * r.p_xxx;
  s.p_xxp += h * r.p_xxp;
  s.p_xpp += h * r.p_xpp;
  s.p_ppp += h * r.p_ppp;
}

}  // namespace detail

// One fourth-order Yoshida step for the whole hierarchy. Each kick reads the
// position-type block of the current substage, so every order sees the same
// intermediate values. Negative dtau integrates backwards.
inline void yoshida_step(FlowState& s, DimensionlessParams const& params, double dtau) {
  using C = YoshidaCoefficients;
  detail::drift(s, C::drift[0] * dtau);
  detail::kick(s, params, C::kick[0] * dtau);
  detail::drift(s, C::drift[1] * dtau);
  detail::kick(s, params, C::kick[1] * dtau);
  detail::drift(s, C::drift[2] * dtau);
  detail::kick(s, params, C::kick[2] * dtau);
  detail::drift(s, C::drift[3] * dtau);
}

// Same step restricted to (u, v).
inline void yoshida_point_step(double& u, double& v, DimensionlessParams const& params,
                               double dtau) {
  using C = YoshidaCoefficients;
  for (int stage = 0; stage < 3; ++stage) {
    u += C::drift[stage] * dtau * v;
    v -= C::kick[stage] * dtau * params.force_derivs(u).d1;
  }
  u += C::drift[3] * dtau * v;
}

// Trajectories larger than this are treated as diverged.
inline constexpr double kDivergenceCutoff = 1e12;

class FlowField {
 public:
  FlowField() = default;
  explicit FlowField(PhaseGrid const& grid);

  PhaseGrid const& grid() const { return grid_; }
  double time() const { return tau_; }
  std::size_t size() const { return states_.size(); }

  std::span<FlowState const> states() const { return states_; }
  std::span<FlowState> states() { return states_; }
  FlowState const& operator[](std::size_t k) const { return states_[k]; }

  void set_time(double tau) { tau_ = tau; }

 private:
  PhaseGrid grid_;
  std::vector<FlowState> states_;
  double tau_ = 0.0;
};

// Advances every grid point by n_steps Yoshida steps of dtau. Throws
// DivergenceError naming the first offending index.
void propagate_field(FlowField& field, DimensionlessParams const& params, double dtau,
                     std::size_t n_steps, int threads = 1);

// Maps (u, v) through the classical flow over -tau using n_steps equal steps.
std::pair<double, double> backward_point(double u, double v,
                                         DimensionlessParams const& params, double tau,
                                         std::size_t n_steps);

// Batched form of backward_point operating in place. Entries whose trajectory
// diverges are set to NaN and counted in the return value.
std::size_t backward_points(std::span<double> u, std::span<double> v,
                            DimensionlessParams const& params, double tau,
                            std::size_t n_steps, int threads = 1);

// Forward counterpart used by the classical ensemble and tests.
std::pair<double, double> forward_point(double u, double v,
                                        DimensionlessParams const& params, double tau,
                                        std::size_t n_steps);

}  // namespace qxpanse
