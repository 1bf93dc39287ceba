#include <benchmark/benchmark.h>

#include <sstream>

#include "bench_data.hpp"
#include "parmine/retrieval.hpp"

namespace parmine {
namespace {

std::vector<std::vector<std::string>> tokenized(std::size_t docs) {
  std::vector<std::vector<std::string>> out;
  for (const auto& s : bench::sentences(docs, 15, 9)) out.push_back(tokenize_for_bm25(s, "en"));
  return out;
}

void BM_Bm25Build(benchmark::State& state) {
  const auto docs = tokenized(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Bm25Index(docs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Bm25Build)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_Bm25TopK(benchmark::State& state) {
  const auto docs = tokenized(state.range(0));
  const Bm25Index index(docs);
  std::size_t q = 0;
  for (auto _ : state) benchmark::DoNotOptimize(index.top_k(docs[q++ % docs.size()], 10));
}
BENCHMARK(BM_Bm25TopK)->Arg(10000)->Arg(100000)->Unit(benchmark::kMicrosecond);

void BM_DenseTopK(benchmark::State& state) {
  const auto pool = bench::unit_rows(state.range(0), 256, 4);
  const auto query = bench::unit_rows(1, 256, 5);
  for (auto _ : state) benchmark::DoNotOptimize(dense_top_k(query.row(0), pool, 10));
}
BENCHMARK(BM_DenseTopK)->Arg(10000)->Arg(100000)->Unit(benchmark::kMicrosecond);

void BM_SampleNegatives(benchmark::State& state) {
  std::map<std::string, std::vector<SegmentId>> corpora;
  std::map<std::string, double> weights;
  for (const std::string lang : {"bo", "pi", "sa", "zh"}) {
    for (std::size_t i = 0; i < 200000; ++i) corpora[lang].push_back({lang, i});
    weights[lang] = 0.25;
  }
  for (auto _ : state) benchmark::DoNotOptimize(sample_negatives(corpora, 400412, weights, 0));
}
BENCHMARK(BM_SampleNegatives)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace parmine
