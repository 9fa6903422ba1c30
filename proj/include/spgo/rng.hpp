#pragma once

#include <cstdint>
#include <random>

namespace spgo {

/// Independent random streams derived from one run seed. Each consumer
/// draws from (seed, stream, counter), so adding draws to one stream never
/// shifts another.
enum class Stream : std::uint64_t {
  TestVectors = 1,
  CommutantSamples = 2,
  Equivalence = 3,
  Subsampling = 4,
  IdentityTriples = 5,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 stream_rng(std::uint64_t seed, Stream stream, std::uint64_t counter = 0) {
  const std::uint64_t key = splitmix64(splitmix64(seed) ^ splitmix64(static_cast<std::uint64_t>(stream) << 32 ^ counter));
  return std::mt19937_64(key);
}

}  // namespace spgo
