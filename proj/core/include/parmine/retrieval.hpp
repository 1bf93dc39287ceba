#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "parmine/corpus.hpp"
#include "parmine/embedding.hpp"

namespace parmine {

enum class TaskType { EnglishToClassical, CrosslingualParallel, VerseToCommentary, Qa };

TaskType parse_task_type(std::string_view name);
std::string_view to_string(TaskType type);

struct EvalQuery {
  std::string text;
  std::string lang;
  SegmentId gold;
  /// English rendering of the query for pivot strategies, when supplied.
  std::optional<std::string> pivot;
};

struct PoolItem {
  SegmentId id;
  std::string text;
  std::string lang;
  std::optional<std::string> pivot;
};

struct EvalTask {
  std::string name;
  TaskType type = TaskType::CrosslingualParallel;
  std::vector<EvalQuery> queries;
};

/// Task JSONL: {"query", "query_lang", "gold": "doc_id#index"} with an
/// optional "query_pivot".
std::vector<EvalQuery> read_task_jsonl(std::istream& in);

// ---------------------------------------------------------------------------
// Negative pool

/// Per-language sample sizes: floor(total * weight) plus one for the largest
/// fractional remainders (ties by language order) so they sum to `total`.
/// Weights must sum to 1 within 1e-9.
std::map<std::string, std::size_t> allocate_counts(std::size_t total,
                                                   const std::map<std::string, double>& weights);

/// Samples without replacement `allocate_counts(total, weights)[lang]` ids
/// from every corpus, reproducibly from `seed`. The pool lists languages in
/// order, each by ascending sentence position. Throws DataError naming a
/// language whose corpus is too small.
std::vector<SegmentId> sample_negatives(
    const std::map<std::string, std::vector<SegmentId>>& corpora, std::size_t total,
    const std::map<std::string, double>& weights, std::uint64_t seed);

/// Appends every gold id not already present. Returns the number added.
std::size_t add_golds(std::vector<SegmentId>& pool, const std::vector<SegmentId>& golds);

// ---------------------------------------------------------------------------
// Sparse retrieval

/// zh: one token per scalar, punctuation and whitespace dropped.
/// en: ASCII-lowercased runs of letters/digits (non-ASCII scalars count as
/// letters). Other languages: whitespace split.
std::vector<std::string> tokenize_for_bm25(std::string_view text, std::string_view lang);

struct Bm25Params {
  double k1 = 1.5;
  double b = 0.75;
};

/// Okapi BM25 with idf(t) = ln(1 + (N - n_t + 0.5) / (n_t + 0.5)).
class Bm25Index {
 public:
  Bm25Index(const std::vector<std::vector<std::string>>& docs, Bm25Params params = {});

  std::size_t size() const noexcept { return doc_len_.size(); }
  double avgdl() const noexcept { return avgdl_; }
  double idf(std::string_view term) const;
  std::size_t doc_freq(std::string_view term) const;

  /// Score of every document for the query.
  std::vector<double> scores(const std::vector<std::string>& query) const;

  /// All document ids, descending score, ties by ascending id.
  std::vector<std::size_t> rank(const std::vector<std::string>& query) const;
  /// First `k` entries of rank().
  std::vector<std::size_t> top_k(const std::vector<std::string>& query, std::size_t k) const;

 private:
  struct Posting {
    std::uint32_t doc;
    std::uint32_t freq;
  };
  Bm25Params params_;
  std::vector<std::size_t> doc_len_;
  double avgdl_ = 0.0;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
};

// ---------------------------------------------------------------------------
// Dense retrieval

/// All pool rows, descending dot product with `query`, ties by ascending id.
std::vector<std::size_t> dense_rank(std::span<const float> query, const EmbeddingMatrix& pool);
std::vector<std::size_t> dense_top_k(std::span<const float> query, const EmbeddingMatrix& pool,
                                     std::size_t k);

/// Selects the first k of a full ranking by (descending score, ascending id).
std::vector<std::size_t> top_k_by_score(const std::vector<double>& scores, std::size_t k);

// ---------------------------------------------------------------------------
// Metrics

struct Metrics {
  std::map<std::size_t, double> p_at;  // k -> fraction of queries
  std::size_t n_queries = 0;
};

/// P@k = share of queries whose gold id is among the first k ranked ids.
/// Throws DataError when a query has no ranking.
Metrics precision_at_k(const std::vector<std::vector<std::size_t>>& rankings,
                       const std::vector<std::size_t>& golds,
                       const std::vector<std::size_t>& ks = {1, 5, 10});

/// Rounded integer percentage, e.g. 0.934 -> "93".
std::string format_percent(double fraction);

struct ReportRow {
  std::string task;
  std::string strategy;
  Metrics metrics;
};

/// TSV with header: task, strategy, P@1, P@5, P@10.
void write_report_tsv(std::ostream& out, const std::vector<ReportRow>& rows);

}  // namespace parmine
