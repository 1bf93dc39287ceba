#include <benchmark/benchmark.h>

#include "bench_data.hpp"
#include "parmine/knn.hpp"

namespace parmine {
namespace {

// Args: index rows, dim. 1,000 queries, k = 10.
void BM_KnnSearch(benchmark::State& state) {
  const auto index = bench::unit_rows(state.range(0), state.range(1), 1);
  const auto queries = bench::unit_rows(1000, state.range(1), 2);
  KnnParams p;
  p.k = 10;
  p.min_sim = -1.0;
  for (auto _ : state) benchmark::DoNotOptimize(knn_search(queries, index, p));
  state.SetItemsProcessed(state.iterations() * 1000 * state.range(0));
}
BENCHMARK(BM_KnnSearch)->Args({10000, 256})->Args({50000, 16})->Args({50000, 256})->Unit(benchmark::kMillisecond);

void BM_KnnIndexBlock(benchmark::State& state) {
  const auto index = bench::unit_rows(20000, 256, 3);
  const auto queries = bench::unit_rows(512, 256, 4);
  KnnParams p;
  p.k = 5;
  p.index_block = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(knn_search(queries, index, p));
}
BENCHMARK(BM_KnnIndexBlock)->RangeMultiplier(4)->Range(32, 2048)->Unit(benchmark::kMillisecond);

void BM_Dot(benchmark::State& state) {
  const auto m = bench::unit_rows(2, state.range(0), 5);
  for (auto _ : state) benchmark::DoNotOptimize(dot(m.row(0), m.row(1)));
}
BENCHMARK(BM_Dot)->Arg(256)->Arg(1024);

}  // namespace
}  // namespace parmine
