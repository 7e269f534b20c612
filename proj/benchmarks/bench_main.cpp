#include <benchmark/benchmark.h>

#include "seqctx/linalg.hpp"
#include "seqctx/measurement.hpp"
#include "seqctx/ontic.hpp"
#include "seqctx/quantum.hpp"
#include "seqctx/scenario.hpp"
#include "seqctx/sim.hpp"

using namespace seqctx;

namespace {

void BM_ContextualityValue(benchmark::State& state) {
  const CycleScenario sc = build_kcbs_scenario();
  for (auto _ : state) {
    benchmark::DoNotOptimize(contextuality_value(sc));
  }
}
BENCHMARK(BM_ContextualityValue);

void BM_Eigenvalues3x3(benchmark::State& state) {
  const CycleScenario sc = build_kcbs_scenario();
  const HermitianOperator k = build_config1(sc).find("K");
  for (auto _ : state) {
    benchmark::DoNotOptimize(eigenvalues(k));
  }
}
BENCHMARK(BM_Eigenvalues3x3);

void BM_ConditionalTable(benchmark::State& state) {
  const CycleScenario sc = build_kcbs_scenario();
  const DensityState mixed = DensityState::maximally_mixed(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(conditional_table(sc, mixed));
  }
}
BENCHMARK(BM_ConditionalTable);

void BM_SimulatedShots(benchmark::State& state) {
  SimConfig cfg{build_kcbs_scenario(), DensityState::maximally_mixed(3),
                static_cast<std::uint64_t>(state.range(0)), 7, 1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_sequential(cfg));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulatedShots)->Arg(1 << 14)->Arg(1 << 17)->Arg(1 << 20);

void BM_OptimizerRestart(benchmark::State& state) {
  const CycleScenario sc = build_kcbs_scenario();
  OptimizerConfig cfg;
  cfg.ontic_states = static_cast<int>(state.range(0));
  cfg.restarts = 1;
  cfg.workers = 1;
  cfg.mode.exhaustive = true;
  cfg.mode.overlap_cap = true;
  for (auto _ : state) {
    benchmark::DoNotOptimize(maximize_C(sc, cfg));
  }
}
BENCHMARK(BM_OptimizerRestart)->Arg(2)->Arg(4)->Arg(6);

void BM_BoundChain(benchmark::State& state) {
  const CycleScenario sc = build_kcbs_scenario();
  SplitMix64 rng(3);
  const OnticModel m = random_feasible_model(rng, 4, true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(verify_bound_chain(m, sc));
  }
}
BENCHMARK(BM_BoundChain);

}  // namespace

BENCHMARK_MAIN();
