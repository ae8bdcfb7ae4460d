// Serial reference kernels against their OpenMP versions.
#include <benchmark/benchmark.h>

#include "torsion8/arith.hpp"
#include "torsion8/ecount.hpp"
#include "torsion8/immersion.hpp"

using namespace torsion8;

namespace {

void BM_CensusSerial(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ecount::trace_census_serial(2, k, ecount::Mode::family));
}

void BM_CensusParallel(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ecount::trace_census_parallel(2, k, ecount::Mode::family));
}

std::vector<std::uint32_t> sweep_primes() { return primes_in(131, 200); }

void BM_SweepSerial(benchmark::State& state) {
  const auto primes = sweep_primes();
  for (auto _ : state) benchmark::DoNotOptimize(immersion::sweep_serial(primes, 8, 2));
}

void BM_SweepParallel(benchmark::State& state) {
  const auto primes = sweep_primes();
  for (auto _ : state) benchmark::DoNotOptimize(immersion::sweep_parallel(primes, 8, 2));
}

}  // namespace

BENCHMARK(BM_CensusSerial)->DenseRange(5, 7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CensusParallel)->DenseRange(5, 7)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
