#pragma once

#include <cstdint>
#include <random>

namespace rydcopy {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based child seed: independent of execution order.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(root) ^ stream) ^ index);
}

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace rydcopy
