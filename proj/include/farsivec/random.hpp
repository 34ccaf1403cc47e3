#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace farsivec {

// The standard distributions are implementation-defined; these helpers keep
// seeded runs identical across standard libraries.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// Uniform integer in [0, n) without modulo bias. n must be positive.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % n;
}

template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t k = items.size(); k > 1; --k) {
    const auto j = static_cast<std::size_t>(uniform_index(rng, k));
    std::swap(items[k - 1], items[j]);
  }
}

}  // namespace farsivec
