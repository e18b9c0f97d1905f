#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gpmfs/errors.hpp"

namespace gpmfs {

// Deterministic generator: mt19937_64 with hand-rolled draw rules. The raw
// engine sequence is pinned by the standard; std::uniform_int_distribution
// and std::shuffle are not, so they are avoided on purpose.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw ArgumentError("SeededRng::below: bound must be positive");
    return engine_() % bound;
  }

  /// Uniform double in [0, 1) with 53-bit resolution.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// In-place Fisher-Yates shuffle driven by SeededRng::below.
template <typename T>
void shuffle(std::vector<T>& values, SeededRng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace gpmfs
