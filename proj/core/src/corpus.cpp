#include "parmine/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "parmine/error.hpp"
#include "parmine/utf8.hpp"

namespace parmine {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

bool has_newline(std::string_view s) { return s.find_first_of("\r\n") != std::string_view::npos; }

void check_segment(const std::string& doc_id, std::string_view kind, std::size_t i,
                   std::string_view text) {
  if (has_newline(text)) {
    throw DataError("document '" + doc_id + "': " + std::string(kind) + " " + std::to_string(i) +
                    " contains a newline");
  }
  if (utf8::trim(text).empty()) {
    throw DataError("document '" + doc_id + "': " + std::string(kind) + " " + std::to_string(i) +
                    " is empty");
  }
  if (!utf8::is_valid(text)) {
    throw DataError("document '" + doc_id + "': " + std::string(kind) + " " + std::to_string(i) +
                    " is not valid UTF-8");
  }
}

std::vector<std::string> string_array(const json& value, std::string_view key) {
  if (!value.is_array()) throw DataError("\"" + std::string(key) + "\" must be an array of strings");
  std::vector<std::string> out;
  out.reserve(value.size());
  for (const auto& item : value) {
    if (!item.is_string()) {
      throw DataError("\"" + std::string(key) + "\" must be an array of strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

Document parse_record(std::string_view line, const LanguageTag& lang) {
  json record;
  try {
    record = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed JSON: ") + e.what());
  }
  if (!record.is_object()) throw DataError("record must be a JSON object");
  for (const auto& [key, _] : record.items()) {
    if (key != "doc_id" && key != "lang" && key != "sentences" && key != "pivot") {
      throw DataError("unknown key \"" + key + "\"");
    }
  }
  if (!record.contains("doc_id") || !record["doc_id"].is_string()) {
    throw DataError("missing string \"doc_id\"");
  }
  if (!record.contains("lang") || !record["lang"].is_string()) {
    throw DataError("missing string \"lang\"");
  }
  if (!record.contains("sentences")) throw DataError("missing \"sentences\"");

  LanguageTag record_lang(record["lang"].get<std::string>());
  if (record_lang != lang) {
    throw DataError("language mismatch: record has \"" + record_lang.code() + "\", expected \"" +
                    lang.code() + "\"");
  }
  std::optional<std::vector<std::string>> pivot;
  if (record.contains("pivot")) pivot = string_array(record["pivot"], "pivot");
  return Document::make(record["doc_id"].get<std::string>(), std::move(record_lang),
                        string_array(record["sentences"], "sentences"), std::move(pivot));
}

bool is_delimiter(char32_t cp, const LanguageTag& lang) {
  if (lang.is_sanskrit_or_pali()) return cp == U'।' || cp == U'॥';
  if (lang.is_tibetan()) return cp == U'།';
  if (lang.is_chinese()) return cp == U'。' || cp == U'！' || cp == U'？';
  return cp == U'.' || cp == U'!' || cp == U'?';
}

}  // namespace

LanguageTag::LanguageTag(std::string_view code) {
  if (code.size() < 2 || code.size() > 3) {
    throw DataError("invalid language code \"" + std::string(code) + "\"");
  }
  for (char c : code) {
    if (c < 'a' || c > 'z') throw DataError("invalid language code \"" + std::string(code) + "\"");
  }
  code_ = std::string(code);
}

bool LanguageTag::is_known() const noexcept {
  return code_ == "sa" || code_ == "pi" || code_ == "bo" || code_ == "zh" || code_ == "en";
}

Document Document::make(std::string doc_id, LanguageTag lang, std::vector<std::string> sentences,
                        std::optional<std::vector<std::string>> pivot) {
  if (doc_id.empty()) throw DataError("empty doc_id");
  if (pivot && pivot->size() != sentences.size()) {
    throw DataError("pivot length mismatch in document '" + doc_id + "': " +
                    std::to_string(sentences.size()) + " sentences, " +
                    std::to_string(pivot->size()) + " pivot strings");
  }
  Document doc;
  doc.doc_id = std::move(doc_id);
  doc.lang = std::move(lang);
  doc.sentences.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    check_segment(doc.doc_id, "sentence", i, sentences[i]);
    Sentence s;
    s.doc_id = doc.doc_id;
    s.index = i;
    s.char_len = utf8::length(sentences[i]);
    s.text = std::move(sentences[i]);
    doc.sentences.push_back(std::move(s));
  }
  if (pivot) {
    for (std::size_t i = 0; i < pivot->size(); ++i) check_segment(doc.doc_id, "pivot", i, (*pivot)[i]);
  }
  doc.pivot = std::move(pivot);
  return doc;
}

std::string SegmentId::str() const { return doc_id + "#" + std::to_string(index); }

SegmentId SegmentId::parse(std::string_view text) {
  const std::size_t hash = text.rfind('#');
  if (hash == std::string_view::npos || hash == 0 || hash + 1 == text.size()) {
    throw DataError("bad segment id \"" + std::string(text) + "\" (expected doc_id#index)");
  }
  SegmentId id;
  id.doc_id = std::string(text.substr(0, hash));
  const std::string_view digits = text.substr(hash + 1);
  for (char c : digits) {
    if (c < '0' || c > '9') throw DataError("bad segment id \"" + std::string(text) + "\"");
  }
  id.index = std::stoull(std::string(digits));
  return id;
}

void CorpusStore::add(Document doc) {
  if (by_id_.contains(doc.doc_id)) throw DataError("duplicate doc_id '" + doc.doc_id + "'");
  by_id_.emplace(doc.doc_id, docs_.size());
  sentence_count_ += doc.sentences.size();
  docs_.push_back(std::move(doc));
}

const Document* CorpusStore::find(std::string_view doc_id) const {
  const auto it = by_id_.find(std::string(doc_id));
  return it == by_id_.end() ? nullptr : &docs_[it->second];
}

const Document& CorpusStore::at(std::string_view doc_id) const {
  const Document* doc = find(doc_id);
  if (!doc) throw DataError("unknown doc_id '" + std::string(doc_id) + "'");
  return *doc;
}

const Sentence& CorpusStore::resolve(const SegmentId& id) const {
  const Document& doc = at(id.doc_id);
  if (id.index >= doc.sentences.size()) {
    throw DataError("segment " + id.str() + " out of range (document has " +
                    std::to_string(doc.sentences.size()) + " sentences)");
  }
  return doc.sentences[id.index];
}

void ingest_corpus_into(CorpusStore& store, std::istream& in, const LanguageTag& lang) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      store.add(parse_record(line, lang));
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

CorpusStore ingest_corpus(std::istream& in, const LanguageTag& lang) {
  CorpusStore store;
  ingest_corpus_into(store, in, lang);
  return store;
}

CorpusStore load_corpus_file(const std::string& path, const LanguageTag& lang) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file " + path);
  try {
    return ingest_corpus(in, lang);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string document_to_json(const Document& doc) {
  ordered_json record;
  record["doc_id"] = doc.doc_id;
  record["lang"] = doc.lang.code();
  auto sentences = ordered_json::array();
  for (const auto& s : doc.sentences) sentences.push_back(s.text);
  record["sentences"] = std::move(sentences);
  if (doc.pivot) record["pivot"] = *doc.pivot;
  return record.dump();
}

void write_corpus(std::ostream& out, const CorpusStore& store) {
  for (const auto& doc : store.documents()) out << document_to_json(doc) << '\n';
}

std::vector<std::string> segment_text(std::string_view raw, const LanguageTag& lang) {
  const std::u32string cps = utf8::decode(raw);
  const bool needs_space = !(lang.is_sanskrit_or_pali() || lang.is_tibetan() || lang.is_chinese());
  std::vector<std::string> out;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    const std::string piece(utf8::trim(utf8::encode(std::u32string_view(cps).substr(start, end - start))));
    if (!piece.empty()) out.push_back(piece);
    start = end;
  };
  std::size_t i = 0;
  while (i < cps.size()) {
    if (!is_delimiter(cps[i], lang)) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < cps.size() && is_delimiter(cps[j], lang)) ++j;
    if (needs_space && j < cps.size() && !utf8::is_space(cps[j])) {
      i = j;
      continue;
    }
    flush(j);
    i = j;
  }
  flush(cps.size());
  return out;
}

StatsReport corpus_stats(const CorpusStore& store) {
  StatsReport report;
  std::map<std::string, std::size_t> chars;
  std::map<std::string, std::size_t> pivoted;
  for (const auto& doc : store.documents()) {
    auto& ls = report.by_language[doc.lang.code()];
    ls.known_language = doc.lang.is_known();
    ++ls.documents;
    ls.sentences += doc.sentences.size();
    for (const auto& s : doc.sentences) chars[doc.lang.code()] += s.char_len;
    if (doc.pivot) pivoted[doc.lang.code()] += doc.sentences.size();
  }
  for (auto& [code, ls] : report.by_language) {
    if (ls.sentences > 0) {
      ls.mean_char_len = static_cast<double>(chars[code]) / static_cast<double>(ls.sentences);
      ls.pivot_coverage = static_cast<double>(pivoted[code]) / static_cast<double>(ls.sentences);
    }
    report.total_documents += ls.documents;
    report.total_sentences += ls.sentences;
  }
  return report;
}

void write_stats_tsv(std::ostream& out, const StatsReport& report) {
  out << "lang\tdocuments\tsentences\tmean_char_len\tpivot_coverage\tknown\n";
  char buf[64];
  for (const auto& [code, ls] : report.by_language) {
    out << code << '\t' << ls.documents << '\t' << ls.sentences << '\t';
    std::snprintf(buf, sizeof buf, "%.2f\t%.4f", ls.mean_char_len, ls.pivot_coverage);
    out << buf << '\t' << (ls.known_language ? "yes" : "no") << '\n';
  }
  out << "total\t" << report.total_documents << '\t' << report.total_sentences << "\t\t\t\n";
}

}  // namespace parmine
