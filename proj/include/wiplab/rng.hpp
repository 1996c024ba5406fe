#pragma once

#include <cstdint>
#include <random>

namespace wiplab {

// Counter-based stream derivation: every (master_seed, stream_index) pair
// yields an independent, reproducible generator, so thread count never
// changes results.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 make_stream(std::uint64_t master_seed,
                                   std::uint64_t stream_index) {
  const std::uint64_t s = splitmix64(master_seed ^ splitmix64(stream_index));
  return std::mt19937_64(s);
}

inline double uniform01(std::mt19937_64& g) {
  // 53-bit mantissa, uniform on [0,1)
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// van der Corput sequence, base 2; k-th point in [0,1)
inline double van_der_corput(std::uint32_t k) {
  std::uint32_t r = 0;
  for (int b = 0; b < 32; ++b) {
    r = (r << 1) | (k & 1u);
    k >>= 1;
  }
  return static_cast<double>(r) * 0x1.0p-32;
}

}  // namespace wiplab
