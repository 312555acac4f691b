#pragma once

#include <cstdint>

namespace hopfrc {

/// splitmix64: portable, so seeded runs match across standard libraries.
inline std::uint64_t next_u64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Uniform in [0, 1) with 53 random bits.
inline double next_unit(std::uint64_t& state) {
  return static_cast<double>(next_u64(state) >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n), n > 0.
inline std::uint64_t next_below(std::uint64_t& state, std::uint64_t n) {
  return next_u64(state) % n;
}

}  // namespace hopfrc
