#include "sck/sde.hpp"
#include "sck/thresholds.hpp"

#include <benchmark/benchmark.h>

namespace {

sck::ReducedProblem1D demo_problem() {
  sck::ReducedProblem1D p;
  p.cost = sck::RunningCost::quadratic(1.0);
  return p;
}

double demo_band() {
  const sck::Resolvent res(sck::RunningCost::quadratic(1.0), 1.0, 1.0);
  return sck::solve_threshold(res, 0.5).c;
}

void run(benchmark::State& state, bool serial) {
  sck::SimConfig cfg;
  cfg.n_paths = static_cast<std::size_t>(state.range(0));
  cfg.horizon = 4.0;
  const auto p = demo_problem();
  const double c = demo_band();
  for (auto _ : state) {
    const auto e = serial ? sck::estimate_cost_serial(cfg, p, c) : sck::estimate_cost(cfg, p, c);
    benchmark::DoNotOptimize(e.mean);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * static_cast<long>(cfg.steps()));
}

void BM_estimate_cost_serial(benchmark::State& state) { run(state, true); }
void BM_estimate_cost_parallel(benchmark::State& state) { run(state, false); }

}  // namespace

BENCHMARK(BM_estimate_cost_serial)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_estimate_cost_parallel)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
