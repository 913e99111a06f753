// Serial reference vs OpenMP cell simulation, plus the fit kernel alone.
//
//   ./build/bench/bench_montecarlo --benchmark_min_time=1

#include "llfit/distribution.hpp"
#include "llfit/estimation.hpp"
#include "llfit/montecarlo.hpp"

#include <benchmark/benchmark.h>

#include <omp.h>

namespace {

llfit::SimConfig cell(long n, double p)
{
  llfit::SimConfig cfg;
  cfg.n = n;
  cfg.p = p;
  cfg.reps = 2000;
  cfg.master_seed = 7;
  return cfg;
}

void BM_CellSerial(benchmark::State& state)
{
  const auto cfg = cell(state.range(0), state.range(1) / 100.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(llfit::run_cell_serial(cfg));
  state.SetItemsProcessed(state.iterations() * cfg.reps);
}

void BM_CellOpenMP(benchmark::State& state)
{
  auto cfg = cell(state.range(0), state.range(1) / 100.0);
  cfg.workers = omp_get_max_threads();
  for (auto _ : state)
    benchmark::DoNotOptimize(llfit::run_cell(cfg));
  state.SetItemsProcessed(state.iterations() * cfg.reps);
  state.counters["threads"] = cfg.workers;
}

void BM_Fit(benchmark::State& state)
{
  const auto n = static_cast<std::size_t>(state.range(0));
  const llfit::TruncatedLogLogistic d(1.0, 1.0, 0.5);
  const llfit::Sample s(llfit::sample(d, n, 11), 0.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(llfit::fit(s));
}

}  // namespace

BENCHMARK(BM_CellSerial)->Args({30, 0})->Args({30, 90})->Args({200, 50})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CellOpenMP)->Args({30, 0})->Args({30, 90})->Args({200, 50})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Fit)->Arg(30)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
