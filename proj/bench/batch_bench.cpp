// Serial reference vs OpenMP episode-batch kernel on the same episodes.

#include <benchmark/benchmark.h>

#include <vector>

#include "seqscan/batch.hpp"
#include "seqscan/config.hpp"
#include "seqscan/recipes.hpp"

namespace {

struct Workload {
  std::vector<seqscan::ProcessSpec> specs;
  seqscan::PolicyConfig policy;
};

Workload composite_workload(double k) {
  const auto config = seqscan::figure_recipe("fig1");
  return {seqscan::specs_at(config, k), seqscan::policy_config(config, config.policies.front(), k)};
}

void BM_Serial(benchmark::State& state) {
  const auto w = composite_workload(static_cast<double>(state.range(0)));
  const seqscan::BatchRange range{1, 0, static_cast<std::uint64_t>(state.range(1))};
  for (auto _ : state) benchmark::DoNotOptimize(seqscan::run_batch_serial(w.specs, w.policy, range));
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

void BM_Parallel(benchmark::State& state) {
  const auto w = composite_workload(static_cast<double>(state.range(0)));
  const seqscan::BatchRange range{1, 0, static_cast<std::uint64_t>(state.range(1))};
  for (auto _ : state) benchmark::DoNotOptimize(seqscan::run_batch_parallel(w.specs, w.policy, range));
  state.SetItemsProcessed(state.iterations() * state.range(1));
  state.counters["threads"] = seqscan::batch_threads();
}

BENCHMARK(BM_Serial)->Args({4, 500})->Args({12, 500})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel)->Args({4, 500})->Args({12, 500})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
