#pragma once
#include <cstdint>

namespace percolog {

// 64-bit avalanche finalizer (splitmix64 constants). Bijective on uint64.
inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ull;  // 2^64 / golden ratio

// Counter-based random stream: word(w) is a pure function of (seed, index, w).
// No state advances, so any subset of the stream can be generated in any order
// by any worker and the bits come out identical. This is what makes sampled
// configurations depend only on (seed, sample index), never on thread count.
struct CounterRng {
  uint64_t key;

  CounterRng(uint64_t seed, uint64_t index)
      : key(mix64(mix64(seed + kGamma) + index * kGamma)) {}

  uint64_t word(uint64_t w) const { return mix64(key + (w + 1) * kGamma); }

  // uniform in [0,1) with 53 random bits, indexed by counter w
  double uniform(uint64_t w) const { return double(word(w) >> 11) * 0x1.0p-53; }
};

}  // namespace percolog
