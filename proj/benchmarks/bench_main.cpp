#include <benchmark/benchmark.h>

#include <vector>

#include "qxpanse/flow.hpp"
#include "qxpanse/liouville_operator.hpp"
#include "qxpanse/scenario.hpp"
#include "qxpanse/stepper.hpp"

using namespace qxpanse;

namespace {

DimensionlessParams baseline_params() {
  DimensionlessParams p;
  p.potential = Potential::quartic(100.0);
  p.noise = 1e-5;
  return p;
}

PhaseGrid baseline_grid() { return PhaseGrid::centered(255, 56, 0.39, 0.16); }

// Flow advanced to the middle of the eta = 100 baseline run, where D is far from trivial.
FlowField evolved_flow(PhaseGrid const& grid, double tau) {
  FlowField flow(grid);
  propagate_field(flow, baseline_params(), 0.005, static_cast<std::size_t>(tau / 0.005));
  return flow;
}

void BM_FlowStep(benchmark::State& state) {
  auto const params = baseline_params();
  FlowField flow(baseline_grid());
  for (auto _ : state) {
    propagate_field(flow, params, 0.005, 1, static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(flow.states().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(flow.size()));
}
BENCHMARK(BM_FlowStep)->Arg(1);

void BM_Assemble(benchmark::State& state) {
  FlowField const flow = evolved_flow(baseline_grid(), 75.0);
  auto const g = g_field(flow, baseline_params());
  for (auto _ : state) {
    SparseOperator op = assemble_operator(flow.grid(), g);
    benchmark::DoNotOptimize(op.inf_norm());
  }
}
BENCHMARK(BM_Assemble);

void BM_MatVec(benchmark::State& state) {
  FlowField const flow = evolved_flow(baseline_grid(), 75.0);
  SparseOperator const op = assemble_operator(flow.grid(), g_field(flow, baseline_params()));
  std::vector<double> x(op.dim(), 1.0), y(op.dim());
  for (auto _ : state) {
    op.apply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(op.dim()));
}
BENCHMARK(BM_MatVec);

void BM_Expmv(benchmark::State& state) {
  FlowField const flow = evolved_flow(baseline_grid(), 75.0);
  SparseOperator const op = assemble_operator(flow.grid(), g_field(flow, baseline_params()));
  WignerField const w = gaussian_initial(flow.grid(), InitialSpec{});
  ExpmvStats stats;
  for (auto _ : state) {
    auto y = expmv(op, w.values, 0.05, 1e-10, 60, 1, &stats);
    benchmark::DoNotOptimize(y.data());
  }
  state.counters["matvecs"] = static_cast<double>(stats.matvecs);
}
BENCHMARK(BM_Expmv);

void BM_Advance(benchmark::State& state) {
  StepperConfig cfg;
  for (auto _ : state) {
    state.PauseTiming();
    Simulation sim(baseline_params(), gaussian_initial(baseline_grid(), InitialSpec{}), cfg);
    state.ResumeTiming();
    for (int k = 0; k < 10; ++k) advance(sim);
    benchmark::DoNotOptimize(sim.wigner().values.data());
  }
}
BENCHMARK(BM_Advance)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
