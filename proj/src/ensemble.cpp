#include "dynclust/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "dynclust/seeding.hpp"

namespace dynclust {

RunFailure::RunFailure(std::uint64_t seed, const std::string& what)
    : Error("clusterer run with seed " + std::to_string(seed) + " failed: " + what), seed_(seed) {}

std::size_t default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body) {
  if (workers == 0) workers = default_workers();
  workers = std::min(workers, n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    drain();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(drain);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

Partition run_member(const SegmentGraph& g, ClustererConfig cfg, std::uint64_t seed) {
  if (g.empty()) return Partition(std::vector<BlockId>(g.node_count(), 0));
  cfg.rng_seed = seed;
  try {
    return cluster(g, cfg);
  } catch (const std::exception& e) {
    throw RunFailure(seed, e.what());
  }
}

}  // namespace

PartitionCloud run_segment_pipeline(const SegmentGraph& g, const ClustererConfig& cfg,
                                    std::span<const std::uint64_t> seeds, std::size_t workers) {
  PartitionCloud cloud;
  cloud.segment_index = g.segment_index();
  cloud.partitions.resize(seeds.size());
  parallel_for(seeds.size(), workers, [&](std::size_t k) { cloud.partitions[k] = run_member(g, cfg, seeds[k]); });
  return cloud;
}

std::vector<std::uint64_t> ensemble_seeds(std::uint64_t master, std::uint64_t repetition, std::uint64_t segment,
                                          std::size_t K) {
  std::vector<std::uint64_t> out;
  for (std::size_t k = 0; k < K; ++k) {
    out.push_back(derive_seed(master, {SeedStream::clustering, repetition, segment, k}));
  }
  return out;
}

std::vector<PartitionCloud> cluster_segments(std::span<const SegmentGraph> segments, const ClustererConfig& cfg,
                                             std::size_t K, std::uint64_t master, std::uint64_t repetition,
                                             std::size_t workers) {
  std::vector<std::vector<std::uint64_t>> seeds;
  std::vector<PartitionCloud> clouds(segments.size());
  for (std::size_t s = 0; s < segments.size(); ++s) {
    seeds.push_back(ensemble_seeds(master, repetition, s, K));
    clouds[s].segment_index = s;
    clouds[s].partitions.resize(K);
  }
  parallel_for(segments.size() * K, workers, [&](std::size_t task) {
    const std::size_t s = task / K, k = task % K;
    clouds[s].partitions[k] = run_member(segments[s], cfg, seeds[s][k]);
  });
  return clouds;
}

std::vector<Partition> resolve_segments(std::span<const PartitionCloud> clouds, std::size_t radius,
                                        std::size_t workers) {
  std::vector<Partition> reps(clouds.size());
  parallel_for(clouds.size(), workers, [&](std::size_t t) {
    if (radius == 0) {
      reps[t] = resolve(clouds[t]);
    } else {
      const auto context = smoothing_context(clouds, t, radius);
      reps[t] = resolve(clouds[t], context);
    }
  });
  return reps;
}

}  // namespace dynclust
