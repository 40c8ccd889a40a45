#include "dynclust/seeding.hpp"

#include "dynclust/core.hpp"

namespace dynclust {

std::uint64_t derive_seed(std::uint64_t master, const SeedPath& path) {
  const auto stream = static_cast<std::uint64_t>(path.stream);
  if (stream >= (1ULL << 4) || path.repetition >= (1ULL << 16) || path.segment >= (1ULL << 20) ||
      path.member >= (1ULL << 24)) {
    throw ConfigError("seed path component out of range");
  }
  const std::uint64_t index =
      (stream << 60) | (path.repetition << 44) | (path.segment << 24) | path.member;
  return splitmix64(master + index * 0x9E3779B97F4A7C15ULL);
}

}  // namespace dynclust
