#pragma once

#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "parmine/error.hpp"

// Tab-separated helpers shared by the dump readers/writers. Field values escape
// backslash, tab, CR and LF as \\ \t \r \n.
namespace parmine::tsv {

inline std::string escape(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (char c : field) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '\n': out += "\\n"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string unescape(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (field[i] == '\\' && i + 1 < field.size()) {
      const char n = field[++i];
      out.push_back(n == 't' ? '\t' : n == 'r' ? '\r' : n == 'n' ? '\n' : n);
    } else {
      out.push_back(field[i]);
    }
  }
  return out;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

inline std::string_view chomp(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

inline std::size_t to_size(std::string_view text, std::string_view what, std::size_t line_no) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw DataError("line " + std::to_string(line_no) + ": bad " + std::string(what) + " '" +
                    std::string(text) + "'");
  }
  return value;
}

inline double to_double(std::string_view text, std::string_view what, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const std::string s(text);
    const double value = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return value;
  } catch (const std::exception&) {
    throw DataError("line " + std::to_string(line_no) + ": bad " + std::string(what) + " '" +
                    std::string(text) + "'");
  }
}

inline std::string fixed6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

}  // namespace parmine::tsv
