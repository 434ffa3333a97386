#pragma once

#include <cstdint>
#include <random>

namespace glpin {

// Portable uniform in [0, 1): std::uniform_real_distribution is not specified
// bit-for-bit across standard libraries.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(seed * 0x9E3779B97F4A7C15ull + stream * 0xBF58476D1CE4E5B9ull + 1);
}

}  // namespace glpin
