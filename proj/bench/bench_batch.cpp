// Serial reference vs OpenMP batch on random admissible scenarios.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>
#include <vector>

#include "cmrac/batch.hpp"
#include "fixtures.hpp"

namespace {

std::vector<cmrac::ScenarioConfig> make_batch(int count, double horizon) {
  std::mt19937_64 rng(2024);
  std::vector<cmrac::ScenarioConfig> configs;
  for (int i = 0; i < count; ++i) configs.push_back(cmrac::fixtures::random_admissible(rng, 2 + i % 3, horizon));
  return configs;
}

void BM_BatchSerial(benchmark::State& state) {
  const auto configs = make_batch(static_cast<int>(state.range(0)), 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(cmrac::run_batch_serial(configs, {false, false}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BatchOpenMP(benchmark::State& state) {
  const auto configs = make_batch(static_cast<int>(state.range(0)), 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(cmrac::run_batch(configs, {false, false}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = omp_get_max_threads();
}

void BM_ExampleRun(benchmark::State& state) {
  const auto config = cmrac::fixtures::third_order_example();
  for (auto _ : state) benchmark::DoNotOptimize(cmrac::run(config, {false, false}));
}

}  // namespace

BENCHMARK(BM_BatchSerial)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchOpenMP)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExampleRun)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
