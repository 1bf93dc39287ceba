#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "parmine/embedding.hpp"

namespace parmine::bench {

inline EmbeddingMatrix unit_rows(std::size_t count, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> normal;
  EmbeddingMatrix m(count, dim);
  for (std::size_t i = 0; i < count; ++i) {
    auto row = m.row(i);
    double norm = 0.0;
    for (auto& v : row) {
      v = normal(rng);
      norm += static_cast<double>(v) * v;
    }
    for (auto& v : row) v = static_cast<float>(v / std::sqrt(norm));
  }
  return m;
}

/// Sentences of lowercase pseudo-words.
inline std::vector<std::string> sentences(std::size_t count, std::size_t words, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> out(count);
  for (auto& s : out) {
    for (std::size_t w = 0; w < words; ++w) {
      if (w) s += ' ';
      for (std::size_t c = 0, len = 3 + rng() % 6; c < len; ++c) s += static_cast<char>('a' + rng() % 26);
    }
  }
  return out;
}

}  // namespace parmine::bench
