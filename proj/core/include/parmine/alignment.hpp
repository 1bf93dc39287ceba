#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "parmine/corpus.hpp"
#include "parmine/embedding.hpp"

namespace parmine {

/// Contiguous half-open sentence range [begin, begin + count).
struct Span {
  std::size_t begin = 0;
  std::size_t count = 0;

  std::size_t end() const noexcept { return begin + count; }
  bool empty() const noexcept { return count == 0; }

  friend bool operator==(const Span&, const Span&) = default;
};

/// Bead shapes in tie-break preference order.
enum class BeadType { OneOne, TwoOne, OneTwo, TwoTwo, OneZero, ZeroOne };

inline constexpr BeadType kBeadTypes[] = {BeadType::OneOne,  BeadType::TwoOne,
                                          BeadType::OneTwo,  BeadType::TwoTwo,
                                          BeadType::OneZero, BeadType::ZeroOne};

std::size_t src_width(BeadType t) noexcept;
std::size_t tgt_width(BeadType t) noexcept;
bool is_gap(BeadType t) noexcept;
std::string_view to_string(BeadType t) noexcept;

struct Bead {
  Span src;
  Span tgt;
  double score = 0.0;  // 0 for gap beads

  BeadType type() const;
  bool is_gap() const noexcept { return src.empty() || tgt.empty(); }

  friend bool operator==(const Bead&, const Bead&) = default;
};

/// Similarity of a src span against a tgt span, both non-empty, given as
/// (begin, count) pairs.
using SpanScorer = std::function<double(Span src, Span tgt)>;

/// Objective of a bead sequence: sum over beads, left to right, of the bead
/// score, or -gap_penalty for a gap bead.
double alignment_objective(const std::vector<Bead>& beads, double gap_penalty);

/// Monotone bead sequence covering [0, n_src) x [0, n_tgt) that maximizes
/// alignment_objective. Equal objectives prefer the bead types in
/// kBeadTypes order at each lattice cell.
std::vector<Bead> align_spans(std::size_t n_src, std::size_t n_tgt, const SpanScorer& scorer,
                              double gap_penalty);

struct AlignParams {
  double gap_penalty = 0.15;
  std::size_t max_region = 512;
};

/// Aligns two sentence lists, scoring spans by the cosine of the provider
/// embeddings of the space-joined span texts.
std::vector<Bead> align_region(const std::vector<std::string>& src_sents,
                               const std::vector<std::string>& tgt_sents,
                               const EmbeddingProvider& provider, std::size_t batch_size,
                               const AlignParams& params);

/// Centered moving average of bead scores, window truncated at the ends.
std::vector<double> moving_average(const std::vector<Bead>& beads, std::size_t window);

/// Drops beads whose moving average is below `threshold` and returns the
/// maximal surviving runs. Each run is filtered again until nothing more is
/// dropped, so the result is a fixed point.
std::vector<std::vector<Bead>> filter_alignment(const std::vector<Bead>& beads,
                                                std::size_t ma_window, double threshold);

struct AlignedPair {
  std::string src_doc;
  std::string src_lang;
  Span src_span;
  std::string src_text;
  std::string tgt_doc;
  std::string tgt_lang;
  Span tgt_span;
  std::string tgt_text;
  double score = 0.0;
  std::size_t cluster = 0;

  /// "src_doc#first-last|tgt_doc#first-last"
  std::string pair_id() const;
};

struct RatioBounds {
  double lo = 0.33;
  double hi = 3.0;
};

/// Per-direction length-ratio bounds keyed "src-tgt".
class RatioPolicy {
 public:
  RatioPolicy() = default;

  void set(const std::string& src_lang, const std::string& tgt_lang, RatioBounds bounds);

  /// Explicit setting, else (0.1, 1.0) for zh -> other, (1.0, 10.0) for
  /// other -> zh, else (0.33, 3.0).
  RatioBounds bounds(const std::string& src_lang, const std::string& tgt_lang) const;

 private:
  std::map<std::string, RatioBounds> explicit_;
};

struct RatioDecision {
  bool keep = false;
  std::string reason;  // empty when kept
};

/// Keeps the pair iff lo <= char_len(src) / char_len(tgt) <= hi.
RatioDecision ratio_filter(std::size_t src_chars, std::size_t tgt_chars, RatioBounds bounds);
RatioDecision ratio_filter(const AlignedPair& pair, const RatioPolicy& policy);

/// "first-last" inclusive, as used in the dataset exports.
std::string format_span(Span span);
Span parse_span(std::string_view text);

std::string aligned_pair_to_json(const AlignedPair& pair);
AlignedPair aligned_pair_from_json(std::string_view line);

/// TSV with header: src_doc, src_span, tgt_doc, tgt_span, score, src_text, tgt_text.
void write_dataset_tsv(std::ostream& out, const std::vector<AlignedPair>& pairs);
void write_dataset_jsonl(std::ostream& out, const std::vector<AlignedPair>& pairs);
std::vector<AlignedPair> read_dataset_jsonl(std::istream& in);

}  // namespace parmine
