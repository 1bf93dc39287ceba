#include "parmine/windowing.hpp"

#include <istream>
#include <ostream>

#include "parmine/error.hpp"
#include "parmine/utf8.hpp"
#include "tsv.hpp"

namespace parmine {
namespace {

const std::string& segment_text_at(const Document& doc, WindowSource source, std::size_t i) {
  return source == WindowSource::Pivot ? (*doc.pivot)[i] : doc.sentences[i].text;
}

std::size_t segment_len(const Document& doc, WindowSource source, std::size_t i,
                        std::vector<std::size_t>& cache) {
  if (cache.empty()) {
    cache.resize(doc.sentences.size());
    for (std::size_t k = 0; k < cache.size(); ++k) {
      cache[k] = source == WindowSource::Pivot ? utf8::length((*doc.pivot)[k])
                                               : doc.sentences[k].char_len;
    }
  }
  return cache[i];
}

std::string join(const Document& doc, WindowSource source, std::size_t start, std::size_t end) {
  std::string text = segment_text_at(doc, source, start);
  for (std::size_t i = start + 1; i <= end; ++i) {
    text.push_back(' ');
    text += segment_text_at(doc, source, i);
  }
  return text;
}

}  // namespace

WindowSource parse_window_source(std::string_view name) {
  if (name == "pivot") return WindowSource::Pivot;
  if (name == "original") return WindowSource::Original;
  throw ConfigError("unknown window source \"" + std::string(name) + "\" (expected original|pivot)");
}

std::string_view to_string(WindowSource source) {
  return source == WindowSource::Pivot ? "pivot" : "original";
}

std::vector<Window> build_windows(const Document& doc, const WindowParams& params) {
  if (params.min_len < 1) throw ConfigError("windowing.min_len must be >= 1");
  if (params.stride < 1) throw ConfigError("windowing.stride must be >= 1");
  if (params.source == WindowSource::Pivot && !doc.pivot) {
    throw DataError("document '" + doc.doc_id + "' has no pivot translation");
  }
  std::vector<Window> windows;
  const std::size_t n = doc.sentences.size();
  std::vector<std::size_t> lens;
  for (std::size_t start = 0; start < n; start += params.stride) {
    std::size_t end = start;
    std::size_t len = segment_len(doc, params.source, start, lens);
    while (len < params.min_len && end + 1 < n) {
      ++end;
      len += 1 + segment_len(doc, params.source, end, lens);
    }
    Window w;
    w.doc_id = doc.doc_id;
    w.position = windows.size();
    w.start = start;
    w.end = end;
    w.text = join(doc, params.source, start, end);
    w.char_len = len;
    w.short_tail = len < params.min_len;
    windows.push_back(std::move(w));
  }
  return windows;
}

std::vector<Window> build_corpus_windows(const CorpusStore& store, const WindowParams& params) {
  std::vector<Window> all;
  for (const auto& doc : store.documents()) {
    auto windows = build_windows(doc, params);
    std::move(windows.begin(), windows.end(), std::back_inserter(all));
  }
  return all;
}

void write_windows_tsv(std::ostream& out, const std::vector<Window>& windows) {
  out << "doc_id\tposition\tstart\tend\tchar_len\n";
  for (const auto& w : windows) {
    out << tsv::escape(w.doc_id) << '\t' << w.position << '\t' << w.start << '\t' << w.end << '\t'
        << w.char_len << '\n';
  }
}

std::vector<Window> read_windows_tsv(std::istream& in, const CorpusStore& store,
                                     const WindowParams& params) {
  std::vector<Window> windows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = tsv::chomp(line);
    if (line_no == 1 || row.empty()) continue;
    const auto f = tsv::split(row);
    if (f.size() != 5) {
      throw DataError("windows line " + std::to_string(line_no) + ": expected 5 columns");
    }
    Window w;
    w.doc_id = tsv::unescape(f[0]);
    w.position = tsv::to_size(f[1], "position", line_no);
    w.start = tsv::to_size(f[2], "start", line_no);
    w.end = tsv::to_size(f[3], "end", line_no);
    w.char_len = tsv::to_size(f[4], "char_len", line_no);
    const Document& doc = store.at(w.doc_id);
    if (w.start > w.end || w.end >= doc.sentences.size()) {
      throw DataError("windows line " + std::to_string(line_no) + ": range out of document");
    }
    if (params.source == WindowSource::Pivot && !doc.pivot) {
      throw DataError("document '" + doc.doc_id + "' has no pivot translation");
    }
    w.text = join(doc, params.source, w.start, w.end);
    if (utf8::length(w.text) != w.char_len) {
      throw DataError("windows line " + std::to_string(line_no) +
                      ": char_len does not match the corpus text");
    }
    w.short_tail = w.char_len < params.min_len;
    windows.push_back(std::move(w));
  }
  return windows;
}

}  // namespace parmine
