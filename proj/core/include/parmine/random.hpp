#pragma once

#include <cstdint>
#include <random>

namespace parmine {

// std::mt19937_64 output is fixed by the standard; the distributions are not,
// so bounded draws are done here to keep sampling identical across platforms.
using Rng = std::mt19937_64;

/// Uniform integer in [0, bound). bound must be > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
  std::uint64_t draw = rng();
  while (draw > limit) draw = rng();
  return draw % bound;
}

}  // namespace parmine
