#pragma once

#include <cstdint>
#include <random>

namespace dynclust {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent random streams drawn from one master seed.
enum class SeedStream : std::uint64_t {
  generation = 1,
  clustering = 2,
  injection = 3,
};

// Coordinates of one derived seed. Field widths: repetition < 2^16,
// segment < 2^20, member < 2^24.
struct SeedPath {
  SeedStream stream = SeedStream::clustering;
  std::uint64_t repetition = 0;
  std::uint64_t segment = 0;
  std::uint64_t member = 0;
};

// Packs the path into a unique 60-bit index and maps
// master + index * golden through splitmix64. For a fixed master the map is
// injective, so distinct paths never collide. Throws ConfigError when a
// field overflows its width.
std::uint64_t derive_seed(std::uint64_t master, const SeedPath& path);

}  // namespace dynclust
