#include <benchmark/benchmark.h>

#include "bench_data.hpp"

namespace parmine {
namespace {

// Args: sentences per batch, dim.
void BM_MockEmbed(benchmark::State& state) {
  const auto texts = bench::sentences(state.range(0), 20, 2);
  const MockProvider provider(state.range(1));
  std::size_t bytes = 0;
  for (const auto& t : texts) bytes += t.size();
  for (auto _ : state) benchmark::DoNotOptimize(provider.embed_batch(texts));
  state.SetBytesProcessed(state.iterations() * bytes);
}
BENCHMARK(BM_MockEmbed)->Args({64, 256})->Args({1024, 256})->Args({1024, 1024});

void BM_HashGram(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(MockProvider::hash_gram(" धर"));
}
BENCHMARK(BM_HashGram);

}  // namespace
}  // namespace parmine
