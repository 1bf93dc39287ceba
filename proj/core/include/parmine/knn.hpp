#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "parmine/embedding.hpp"
#include "parmine/windowing.hpp"

namespace parmine {

/// One kNN hit: query row -> index row.
struct Neighbor {
  std::size_t query = 0;
  std::size_t target = 0;
  double sim = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct KnnParams {
  std::size_t k = 5;
  double min_sim = 0.65;
  std::size_t threads = 1;
  std::size_t query_block = 64;
  std::size_t index_block = 128;
};

/// Exact top-k by dot product for every query row, keeping hits with
/// sim >= min_sim. Ties go to the lower target index. Output is sorted by
/// (query, descending sim, target). The result does not depend on block
/// sizes or thread count.
std::vector<Neighbor> knn_search(const EmbeddingMatrix& queries, const EmbeddingMatrix& index,
                                 const KnnParams& params);

struct WindowRef {
  std::string doc_id;
  std::size_t position = 0;
  std::size_t global = 0;

  friend bool operator==(const WindowRef&, const WindowRef&) = default;
};

struct CandidatePair {
  WindowRef src;
  WindowRef tgt;
  double sim = 0.0;

  friend bool operator==(const CandidatePair&, const CandidatePair&) = default;
};

/// A window list with its embedding matrix (row i embeds windows[i]).
struct EmbeddedWindows {
  const std::vector<Window>* windows = nullptr;
  const EmbeddingMatrix* matrix = nullptr;
};

struct MiningParams {
  KnnParams knn;
  bool symmetric = true;
  /// Drop pairs whose windows come from the same document (self-mining).
  bool exclude_same_doc = false;
};

/// Source -> target kNN (plus the transposed target -> source results when
/// symmetric). Pairs are unique by (src.global, tgt.global) and sorted by
/// (src.global, descending sim, tgt.global).
std::vector<CandidatePair> mine_pairs(const EmbeddedWindows& src, const EmbeddedWindows& tgt,
                                      const MiningParams& params);

/// TSV with header: src_doc, src_pos, tgt_doc, tgt_pos, sim (6 decimals).
void write_pairs_tsv(std::ostream& out, const std::vector<CandidatePair>& pairs);

/// Pair dump row; global indices are not part of the dump.
struct PairRecord {
  std::string src_doc;
  std::size_t src_pos = 0;
  std::string tgt_doc;
  std::size_t tgt_pos = 0;
  double sim = 0.0;
};

std::vector<PairRecord> read_pairs_tsv(std::istream& in);

}  // namespace parmine
