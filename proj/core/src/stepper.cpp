#include "qxpanse/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qxpanse/error.hpp"

namespace qxpanse {

namespace {

// Per-slice bound on the spectral-norm estimate of D dtau / s. Larger values trade matvecs for
// cancellation in the Taylor sum.
constexpr double kSliceNorm = 4.0;

double norm2(std::span<double const> v) {
  double acc = 0.0;
  for (double a : v) acc += a * a;
  return std::sqrt(acc);
}

std::string where(Simulation const& sim) {
  return " at step " + std::to_string(sim.step() + 1) + " (tau=" +
         std::to_string(sim.time()) + ")";
}

}  // namespace

double WignerField::norm() const {
  double acc = 0.0;
  for (double w : values) acc += w;
  return acc * grid.cell_area();
}

bool WignerField::finite() const {
  return std::all_of(values.begin(), values.end(), [](double a) { return std::isfinite(a); });
}

void StepperConfig::validate() const {
  if (!(dtau > 0.0) || !std::isfinite(dtau)) throw ParameterError("dtau must be positive");
  if (!(tolerance > 0.0) || tolerance > 1e-2)
    throw ParameterError("exp-action tolerance must lie in (0, 1e-2]");
  if (flow_substeps == 0) throw ParameterError("flow substeps must be at least 1");
  if (evaluation == EvaluationPoint::kMidpoint && flow_substeps % 2 != 0)
    throw ParameterError("midpoint evaluation needs an even number of flow substeps");
  if (term_cap < 2) throw ParameterError("term cap must be at least 2");
}

std::vector<double> expmv(SparseOperator const& op, std::span<double const> w, double dtau,
                          double tol, std::size_t term_cap, int threads,
                          ExpmvStats* stats) {
  if (op.dim() != w.size())
    throw ParameterError("operator dimension does not match vector length");
  std::vector<double> y(w.begin(), w.end());
  ExpmvStats local;
  double const scaled = op.two_norm_bound() * std::abs(dtau);
  if (scaled == 0.0) {
    if (stats) *stats = local;
    return y;
  }
  auto const slices = static_cast<std::size_t>(std::max(1.0, std::ceil(scaled / kSliceNorm)));
  double const h = dtau / static_cast<double>(slices);
  double const slice_tol = tol / static_cast<double>(slices);
  local.slices = slices;

  std::vector<double> term(y.size()), next(y.size());
  for (std::size_t s = 0; s < slices; ++s) {
    std::copy(y.begin(), y.end(), term.begin());
    double previous = norm2(term);
    bool converged = false;
    for (std::size_t k = 1; k <= term_cap; ++k) {
      op.apply(term, next, threads);
      ++local.matvecs;
      double const factor = h / static_cast<double>(k);
      for (std::size_t q = 0; q < y.size(); ++q) {
        term[q] = factor * next[q];
        y[q] += term[q];
      }
      double const current = norm2(term);
      if (current + previous <= slice_tol * norm2(y) || current == 0.0) {
        converged = true;
        break;
      }
      previous = current;
    }
    if (!converged)
      throw StepTooLargeError("exponential action did not converge within " +
                              std::to_string(term_cap) +
                              " Taylor terms; reduce the time step (||D|| dtau = " +
                              std::to_string(scaled) + ")");
  }
  if (stats) *stats = local;
  return y;
}

Simulation::Simulation(DimensionlessParams params, WignerField initial, StepperConfig config)
    : params_(std::move(params)),
      config_(config),
      flow_(initial.grid),
      wigner_(std::move(initial)) {
  config_.validate();
  if (wigner_.values.size() != wigner_.grid.size())
    throw ParameterError("initial Wigner field does not match its grid");
  flow_.set_time(wigner_.time);
  start_time_ = wigner_.time;
}

SparseOperator Simulation::current_operator() const {
  auto const g = g_field(flow_, params_, config_.threads);
  return assemble_operator(flow_.grid(), g, config_.threads);
}

void advance(Simulation& sim) {
  StepperConfig const& cfg = sim.config_;
  double const flow_dt = cfg.dtau / static_cast<double>(cfg.flow_substeps);
  try {
    if (cfg.evaluation == EvaluationPoint::kStart) {
      sim.op_ = sim.current_operator();
      propagate_field(sim.flow_, sim.params_, flow_dt, cfg.flow_substeps, cfg.threads);
    } else {
      std::size_t const half = cfg.flow_substeps / 2;
      propagate_field(sim.flow_, sim.params_, flow_dt, half, cfg.threads);
      sim.op_ = sim.current_operator();
      propagate_field(sim.flow_, sim.params_, flow_dt, cfg.flow_substeps - half, cfg.threads);
    }
    sim.wigner_.values = expmv(sim.op_, sim.wigner_.values, cfg.dtau, cfg.tolerance,
                               cfg.term_cap, cfg.threads, &sim.stats_);
  } catch (DivergenceError const& e) {
    throw DivergenceError(e.what() + where(sim));
  } catch (SymplecticityError const& e) {
    throw SymplecticityError(e.what() + where(sim));
  } catch (AssemblyError const& e) {
    throw AssemblyError(e.what() + where(sim));
  } catch (StepTooLargeError const& e) {
    throw StepTooLargeError(e.what() + where(sim));
  }
  if (!sim.wigner_.finite())
    throw InstabilityError("non-finite Wigner values" + where(sim));
  ++sim.step_;
  double const t = sim.start_time_ + static_cast<double>(sim.step_) * cfg.dtau;
  sim.flow_.set_time(t);
  sim.wigner_.time = t;
}

}  // namespace qxpanse
