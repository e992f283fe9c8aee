#pragma once

#include <cstdint>
#include <random>

namespace nef {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent stream for replica `index` of a run with master `seed`:
/// mt19937_64 seeded with mix64(mix64(seed) ^ (index + 1)).
///
/// Streams depend only on (seed, index), so any parallel schedule produces
/// the same per-replica draws as a serial loop.
inline Rng stream_for(std::uint64_t seed, std::uint64_t index) {
  return Rng(mix64(mix64(seed) ^ (index + 1)));
}

}  // namespace nef
