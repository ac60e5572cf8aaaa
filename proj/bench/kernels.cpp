// Serial reference kernels against their OpenMP counterparts. Thread count is
// the benchmark argument; 1 still goes through the OpenMP code path.

#include <benchmark/benchmark.h>

#include <omp.h>

#include "adeq/cp_solver.hpp"
#include "adeq/graph.hpp"
#include "adeq/instance_gen.hpp"
#include "adeq/oracle.hpp"

namespace {

using namespace adeq;

Market oracle_market() { return generate({3, 0.6, 4, 11, FeasibilityMode::ForceStar}); }

// Dense enough that no small subset closes on itself, so every subset is visited.
Market subset_market() { return generate({12, 0.5, 5, 3, FeasibilityMode::ForceStar}); }

std::vector<Market> batch_markets() {
  std::vector<Market> out;
  for (std::uint64_t seed = 0; seed < 16; ++seed)
    out.push_back(generate({6 + static_cast<int>(seed % 6), 0.3, 10, seed, FeasibilityMode::ForceStar}));
  return out;
}

void thread_args(benchmark::internal::Benchmark* b) {
  for (int t = 1; t <= omp_get_num_procs(); t *= 2) b->Arg(t);
}

void BM_OracleSerial(benchmark::State& state) {
  Market m = oracle_market();
  for (auto _ : state) benchmark::DoNotOptimize(oracle_solve(m));
}
BENCHMARK(BM_OracleSerial)->Unit(benchmark::kMillisecond);

void BM_OracleParallel(benchmark::State& state) {
  Market m = oracle_market();
  for (auto _ : state) benchmark::DoNotOptimize(oracle_solve_parallel(m, {}, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_OracleParallel)->Apply(thread_args)->Unit(benchmark::kMillisecond);

void BM_BatchSerial(benchmark::State& state) {
  auto markets = batch_markets();
  for (auto _ : state) benchmark::DoNotOptimize(solve_batch_serial(markets, {}));
}
BENCHMARK(BM_BatchSerial)->Unit(benchmark::kMillisecond);

void BM_BatchParallel(benchmark::State& state) {
  auto markets = batch_markets();
  for (auto _ : state) benchmark::DoNotOptimize(solve_batch(markets, {}, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_BatchParallel)->Apply(thread_args)->Unit(benchmark::kMillisecond);

void BM_SubsetsSerial(benchmark::State& state) {
  Market m = subset_market();
  for (auto _ : state)
    benchmark::DoNotOptimize(check_super_self_sufficiency(m, SelfSufficiencyMode::Exhaustive));
}
BENCHMARK(BM_SubsetsSerial)->Unit(benchmark::kMillisecond);

void BM_SubsetsParallel(benchmark::State& state) {
  Market m = subset_market();
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(check_super_self_sufficiency_parallel(m));
}
BENCHMARK(BM_SubsetsParallel)->Apply(thread_args)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
