#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dynclust/core.hpp"

namespace dynclust {

// The K partitions produced by independent clusterer runs on one segment.
struct PartitionCloud {
  std::size_t segment_index = 0;
  std::vector<Partition> partitions;

  std::size_t size() const { return partitions.size(); }
  std::size_t node_count() const { return partitions.empty() ? 0 : partitions.front().node_count(); }
  // K >= 1 and a common node universe.
  void validate() const;
};

struct BlockRef {
  std::size_t partition = 0;
  BlockId block = 0;
  friend bool operator==(const BlockRef&, const BlockRef&) = default;
};

struct BlockScore {
  BlockRef source;
  double score = 0;
  std::vector<NodeId> members;  // ascending
};

// Work counters for the block comparisons done while scoring.
struct ResolutionStats {
  std::uint64_t block_comparisons = 0;
  std::uint64_t intersection_work = 0;  // sum of min(|x|, |y|) over compared pairs
};

// Jaccard index |x & y| / |x | y| of two ascending node lists. Throws when
// both are empty.
double similarity(std::span<const NodeId> x, std::span<const NodeId> y);

// Scores every block x of every partition k of `cloud` by the mean, over the
// partitions l != k in scope, of max_y H(x, y). Scope is the cloud itself
// plus every context cloud; run index k is excluded in each cloud so that a
// context identical to the cloud leaves the scores unchanged. Intersections
// iterate the smaller block and probe the other by label, so each comparison
// costs min(|x|, |y|).
std::vector<BlockScore> score_blocks(const PartitionCloud& cloud, std::span<const PartitionCloud> context = {},
                                     ResolutionStats* stats = nullptr);

// Lower median of the block counts of the cloud's partitions.
std::size_t median_block_count(const PartitionCloud& cloud);

// Representative partition with median_block_count() blocks:
//  1. order the scored blocks by score, then size (descending), then
//     member list (ascending);
//  2. accept blocks in that order, dropping nodes already claimed, until
//     the target count of non-empty blocks is reached. A first walk only
//     accepts blocks whose unclaimed part is a strict majority of the block,
//     so near-copies of an accepted block cannot open a fragment block; a
//     second walk accepts any non-empty unclaimed remainder;
//  3. if the list runs out first (every node claimed), walk it again and
//     carve candidate blocks out of the accepted ones whenever no accepted
//     block is left empty;
//  4. attach each unclaimed node to the accepted block most similar to any
//     cloud block containing the node; ties go to the larger accepted block,
//     then to the earlier one.
// Labels follow acceptance order.
Partition resolve(const PartitionCloud& cloud, std::span<const PartitionCloud> context = {},
                  ResolutionStats* stats = nullptr);

// Predicted block-comparison work: sum over ordered pairs k != l of
// c_k c_l min(N/c_k, N/c_l) = N min(c_k, c_l).
std::uint64_t resolution_cost_estimate(const PartitionCloud& cloud);

// Clouds of segments t-radius .. t+radius other than t that exist in `clouds`
// (indexed by segment).
std::vector<PartitionCloud> smoothing_context(std::span<const PartitionCloud> clouds, std::size_t t,
                                              std::size_t radius);

}  // namespace dynclust
