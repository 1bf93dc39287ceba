#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace parmine::utf8 {

/// Decodes UTF-8 into Unicode scalar values. Throws DataError on invalid input.
std::u32string decode(std::string_view text);

void append(std::string& out, char32_t cp);
std::string encode(std::u32string_view cps);

/// Number of Unicode scalar values in `text`.
std::size_t length(std::string_view text);

bool is_valid(std::string_view text);

/// Unicode White_Space property.
bool is_space(char32_t cp);

/// Punctuation and symbols across ASCII, Latin-1, General Punctuation,
/// CJK Symbols, fullwidth forms, and the Indic/Tibetan sentence marks.
bool is_punct(char32_t cp);

std::string_view trim(std::string_view text);

}  // namespace parmine::utf8
