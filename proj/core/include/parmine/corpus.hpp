#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace parmine {

/// Lowercase ASCII language code of 2-3 characters. The classical corpus
/// languages and the English pivot are known; other well-formed codes are
/// accepted and reported as unknown.
class LanguageTag {
 public:
  LanguageTag() = default;

  /// Throws DataError if `code` is not 2-3 lowercase ASCII letters.
  explicit LanguageTag(std::string_view code);

  const std::string& code() const noexcept { return code_; }
  bool is_known() const noexcept;

  bool is_sanskrit_or_pali() const noexcept { return code_ == "sa" || code_ == "pi"; }
  bool is_tibetan() const noexcept { return code_ == "bo"; }
  bool is_chinese() const noexcept { return code_ == "zh"; }
  bool is_english() const noexcept { return code_ == "en"; }

  friend bool operator==(const LanguageTag&, const LanguageTag&) = default;
  friend auto operator<=>(const LanguageTag&, const LanguageTag&) = default;

 private:
  std::string code_;
};

struct Sentence {
  std::string doc_id;
  std::size_t index = 0;
  std::string text;
  std::size_t char_len = 0;
};

struct Document {
  std::string doc_id;
  LanguageTag lang;
  std::vector<Sentence> sentences;
  /// Sentence-aligned English translations, when available.
  std::optional<std::vector<std::string>> pivot;

  /// Builds a document from raw sentence strings, validating invariants.
  static Document make(std::string doc_id, LanguageTag lang, std::vector<std::string> sentences,
                       std::optional<std::vector<std::string>> pivot = std::nullopt);
};

struct SegmentId {
  std::string doc_id;
  std::size_t index = 0;

  /// "doc_id#index"
  std::string str() const;
  /// Parses "doc_id#index"; the last '#' separates the index.
  static SegmentId parse(std::string_view text);

  friend bool operator==(const SegmentId&, const SegmentId&) = default;
  friend auto operator<=>(const SegmentId&, const SegmentId&) = default;
};

/// Immutable after ingestion; safe for concurrent readers.
class CorpusStore {
 public:
  void add(Document doc);

  const std::vector<Document>& documents() const noexcept { return docs_; }
  std::size_t document_count() const noexcept { return docs_.size(); }
  std::size_t sentence_count() const noexcept { return sentence_count_; }
  bool empty() const noexcept { return docs_.empty(); }

  const Document* find(std::string_view doc_id) const;
  const Document& at(std::string_view doc_id) const;
  const Sentence& resolve(const SegmentId& id) const;

 private:
  std::vector<Document> docs_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::size_t sentence_count_ = 0;
};

/// Reads corpus JSONL (one document per line). Every record must carry the
/// language `lang`. Errors name the offending line or document.
CorpusStore ingest_corpus(std::istream& in, const LanguageTag& lang);
/// Appends the documents of `in` to an existing store.
void ingest_corpus_into(CorpusStore& store, std::istream& in, const LanguageTag& lang);
CorpusStore load_corpus_file(const std::string& path, const LanguageTag& lang);

/// Inverse of ingest: one JSONL record per document, keys in fixed order.
void write_corpus(std::ostream& out, const CorpusStore& store);
std::string document_to_json(const Document& doc);

/// Splits raw text into sentences on the language's terminal punctuation.
/// The delimiter stays attached to the preceding sentence.
std::vector<std::string> segment_text(std::string_view raw, const LanguageTag& lang);

struct LanguageStats {
  std::size_t documents = 0;
  std::size_t sentences = 0;
  double mean_char_len = 0.0;
  /// Fraction of sentences that have a pivot translation.
  double pivot_coverage = 0.0;
  bool known_language = true;
};

struct StatsReport {
  std::map<std::string, LanguageStats> by_language;
  std::size_t total_documents = 0;
  std::size_t total_sentences = 0;
};

StatsReport corpus_stats(const CorpusStore& store);
void write_stats_tsv(std::ostream& out, const StatsReport& report);

}  // namespace parmine
