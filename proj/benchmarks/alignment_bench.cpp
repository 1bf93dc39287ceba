#include <benchmark/benchmark.h>

#include "bench_data.hpp"
#include "parmine/alignment.hpp"

namespace parmine {
namespace {

// Lattice DP alone, with a cheap synthetic scorer. Arg: side length.
void BM_AlignSpans(benchmark::State& state) {
  const std::size_t n = state.range(0);
  const SpanScorer scorer = [](Span s, Span t) {
    return s.begin == t.begin ? 0.9 : 0.1 / static_cast<double>(1 + s.count + t.count);
  };
  for (auto _ : state) benchmark::DoNotOptimize(align_spans(n, n, scorer, 0.15));
  state.SetComplexityN(n);
}
BENCHMARK(BM_AlignSpans)->RangeMultiplier(2)->Range(8, 256)->Complexity(benchmark::oNSquared);

// Full region alignment with the mock embedder. Arg: sentences per side.
void BM_AlignRegion(benchmark::State& state) {
  const auto src = bench::sentences(state.range(0), 12, 1);
  const MockProvider provider(256);
  for (auto _ : state) benchmark::DoNotOptimize(align_region(src, src, provider, 64, {}));
}
BENCHMARK(BM_AlignRegion)->Arg(10)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);

void BM_FilterAlignment(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<Bead> beads;
  for (std::size_t i = 0; i < static_cast<std::size_t>(state.range(0)); ++i) {
    beads.push_back({{i, 1}, {i, 1}, static_cast<double>(rng() % 100) / 100.0});
  }
  for (auto _ : state) benchmark::DoNotOptimize(filter_alignment(beads, 3, 0.5));
}
BENCHMARK(BM_FilterAlignment)->Arg(100)->Arg(10000);

}  // namespace
}  // namespace parmine
