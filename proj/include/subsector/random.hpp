#pragma once

#include <cstdint>
#include <random>

namespace subsector {

/// SplitMix64 finalizer; decorrelates nearby seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for substream `index` of `base`. Work item -> substream is fixed, so
/// results do not depend on evaluation order.
constexpr std::uint64_t substream_seed(std::uint64_t base, std::uint64_t index) {
  return mix_seed(mix_seed(base) ^ mix_seed(index + 0x632BE59BD9B4E019ULL));
}

inline std::mt19937_64 substream(std::uint64_t base, std::uint64_t index) {
  return std::mt19937_64(substream_seed(base, index));
}

}  // namespace subsector
