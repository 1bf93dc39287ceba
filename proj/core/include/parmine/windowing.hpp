#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "parmine/corpus.hpp"

namespace parmine {

enum class WindowSource { Original, Pivot };

WindowSource parse_window_source(std::string_view name);
std::string_view to_string(WindowSource source);

struct WindowParams {
  std::size_t min_len = 128;  // Unicode scalars, joining spaces included
  std::size_t stride = 1;     // sentences between window starts
  WindowSource source = WindowSource::Pivot;
};

/// A run of adjacent sentences [start, end] joined by single spaces.
struct Window {
  std::string doc_id;
  std::size_t position = 0;  // ordinal within the document's window list
  std::size_t start = 0;
  std::size_t end = 0;  // inclusive
  std::string text;
  std::size_t char_len = 0;
  /// Trailing window that reached the end of the document below min_len.
  bool short_tail = false;
};

std::vector<Window> build_windows(const Document& doc, const WindowParams& params);

/// Windows of every document of `store`, in store order. The index of a
/// window in the returned list is its global index.
std::vector<Window> build_corpus_windows(const CorpusStore& store, const WindowParams& params);

/// TSV with header: doc_id, position, start, end, char_len.
void write_windows_tsv(std::ostream& out, const std::vector<Window>& windows);

/// Reads a window dump back. Window text is rebuilt from `store` using
/// `params.source`; the short-tail flag is recomputed from `params.min_len`.
std::vector<Window> read_windows_tsv(std::istream& in, const CorpusStore& store,
                                     const WindowParams& params);

}  // namespace parmine
