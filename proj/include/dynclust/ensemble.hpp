#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dynclust/clusterer.hpp"
#include "dynclust/core.hpp"
#include "dynclust/resolver.hpp"

namespace dynclust {

// A clusterer run that failed inside an ensemble; names the seed.
class RunFailure : public Error {
 public:
  RunFailure(std::uint64_t seed, const std::string& what);
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

// Available hardware parallelism, at least 1.
std::size_t default_workers();

// Calls body(i) for i in [0, n) on up to `workers` threads (0: default).
// If calls throw, the exception of the lowest failing index is rethrown
// after all threads join, so the reported failure does not depend on
// scheduling.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body);

// One clusterer run per seed, concurrently up to `workers`. Partition k of
// the cloud comes from seeds[k] whatever the completion order. A segment
// without edges yields K copies of the one-block partition, the same place
// cluster() puts isolated nodes.
PartitionCloud run_segment_pipeline(const SegmentGraph& g, const ClustererConfig& cfg,
                                    std::span<const std::uint64_t> seeds, std::size_t workers = 0);

// Seeds of ensemble members 0..K-1 at (repetition, segment), from the
// clustering stream of the master seed.
std::vector<std::uint64_t> ensemble_seeds(std::uint64_t master, std::uint64_t repetition, std::uint64_t segment,
                                          std::size_t K);

// Clusters every segment with K members; all (segment, member) runs share one
// worker pool. Cloud s holds segment s.
std::vector<PartitionCloud> cluster_segments(std::span<const SegmentGraph> segments, const ClustererConfig& cfg,
                                             std::size_t K, std::uint64_t master, std::uint64_t repetition,
                                             std::size_t workers = 0);

// Representative per segment. radius 0 resolves each cloud on its own;
// radius w scores segment t against the clouds of t-w..t+w. Clouds must all
// exist before this is called, which is the exchange point of the smoothed
// mode.
std::vector<Partition> resolve_segments(std::span<const PartitionCloud> clouds, std::size_t radius,
                                        std::size_t workers = 0);

}  // namespace dynclust
