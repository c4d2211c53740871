// Serial reference path against the OpenMP runner on the same workload.

#include <kgf/suite.hpp>

#include <benchmark/benchmark.h>

namespace {

void run(benchmark::State& state, kgf::Execution execution) {
  kgf::SuiteConfig cfg;
  cfg.trials = static_cast<std::size_t>(state.range(0));
  cfg.seed = 1;
  cfg.execution = execution;
  for (auto _ : state) {
    auto reports = kgf::run_theorem_suite(cfg);
    benchmark::DoNotOptimize(reports);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) *
                          static_cast<std::int64_t>(kgf::theorem_ids().size()));
}

void BM_SuiteSerial(benchmark::State& state) { run(state, kgf::Execution::serial); }
void BM_SuiteParallel(benchmark::State& state) { run(state, kgf::Execution::parallel); }

}  // namespace

BENCHMARK(BM_SuiteSerial)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SuiteParallel)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
