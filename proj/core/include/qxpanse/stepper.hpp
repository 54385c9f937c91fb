#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qxpanse/flow.hpp"
#include "qxpanse/liouville_operator.hpp"
#include "qxpanse/phase_grid.hpp"
#include "qxpanse/units.hpp"

namespace qxpanse {

// Liouville-frame (or lab-frame) Wigner values, k = i * np + j.
struct WignerField {
  PhaseGrid grid;
  std::vector<double> values;
  double time = 0.0;

  // sum W h_x h_p, accumulated in index order.
  double norm() const;
  bool finite() const;
};

enum class EvaluationPoint { kStart, kMidpoint };

struct StepperConfig {
  double dtau = 0.05;
  std::size_t flow_substeps = 10;
  double tolerance = 1e-10;
  EvaluationPoint evaluation = EvaluationPoint::kStart;
  std::size_t term_cap = 60;
  int threads = 1;

  void validate() const;
};

struct ExpmvStats {
  std::size_t slices = 0;
  std::size_t matvecs = 0;
};

// y = exp(dtau D) w by slicing dtau into s pieces with
// sqrt(||D||_1 ||D||_inf) dtau / s bounded and summing Taylor terms per slice until two consecutive terms fall
// below tol / s relative to the running sum (2-norm). Throws StepTooLargeError
// when a slice needs more than term_cap terms.
std::vector<double> expmv(SparseOperator const& op, std::span<double const> w, double dtau,
                          double tol, std::size_t term_cap = 60, int threads = 1,
                          ExpmvStats* stats = nullptr);

// Classical flow plus Liouville-frame Wigner field advanced in lockstep.
class Simulation {
 public:
  Simulation(DimensionlessParams params, WignerField initial, StepperConfig config);

  DimensionlessParams const& params() const { return params_; }
  StepperConfig const& config() const { return config_; }
  FlowField const& flow() const { return flow_; }
  WignerField const& wigner() const { return wigner_; }
  std::size_t step() const { return step_; }
  double time() const { return wigner_.time; }

  // Operator used by the most recent step (empty before the first step).
  SparseOperator const& last_operator() const { return op_; }
  ExpmvStats const& last_expmv() const { return stats_; }

  // Builds D from the current flow without advancing anything.
  SparseOperator current_operator() const;

 private:
  friend void advance(Simulation& sim);

  DimensionlessParams params_;
  StepperConfig config_;
  FlowField flow_;
  WignerField wigner_;
  SparseOperator op_;
  ExpmvStats stats_;
  std::size_t step_ = 0;
  double start_time_ = 0.0;
};

// One PDE step: flow update, inverse map, g field, assembly, exponential
// action. Errors carry the step number and time.
void advance(Simulation& sim);

}  // namespace qxpanse
