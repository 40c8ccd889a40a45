#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dynclust/core.hpp"
#include "dynclust/seeding.hpp"

namespace dynclust {

struct ClustererConfig {
  std::size_t sweeps = 100;  // max full passes over the nodes per block-count level
  double beta = 3.0;         // inverse temperature; 0 accepts everything, +inf is greedy
  std::size_t b_min = 1;
  std::size_t b_max = 0;  // 0: number of non-isolated nodes, capped at max_initial_blocks
  bool anneal = false;    // ramp beta up over the first half of each level's sweeps
  std::uint64_t rng_seed = 0;

  double epsilon = 0.1;               // probability of a uniformly random target block
  std::size_t merge_proposals = 10;   // block-merge candidates tried per block
  double reduction_rate = 0.5;        // block count shrink factor while bracketing
  double convergence_tol = 1e-4;      // relative description-length change that ends a level
  std::size_t max_initial_blocks = 2048;
  bool allow_vacate = false;          // may a move empty its source block

  // Checks b_min <= b_max <= node_count and the numeric ranges.
  void validate(std::size_t node_count) const;
};

// Segment graph in the form the block model works on: every node keeps its
// id, neighbour lists are expanded by multiplicity, self-loops are dropped.
class ClusterGraph {
 public:
  explicit ClusterGraph(const SegmentGraph& g);

  std::size_t node_count() const { return offsets_.size() - 1; }
  std::span<const NodeId> neighbors(NodeId i) const {
    return {adjacency_.data() + offsets_[i], adjacency_.data() + offsets_[i + 1]};
  }
  std::uint64_t degree(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }
  std::uint64_t edge_weight() const { return adjacency_.size() / 2; }
  // x ln x for 0 <= x <= 2E, tabulated.
  double xlogx(std::uint64_t x) const { return xlogx_[x]; }
  // Partition-independent part of the description length: -E - sum ln k_i!.
  double degree_term() const { return degree_term_; }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adjacency_;
  std::vector<double> xlogx_;
  double degree_term_ = 0;
};

// Result of evaluating one candidate node move.
struct MoveEvaluation {
  double delta = 0;           // change in description length
  std::uint64_t to_source = 0;  // edge weight from the node into its current block
  std::uint64_t to_target = 0;  // edge weight from the node into the target block
};

// Labelled block state with the block-pair edge matrix kept current under
// single-node moves. Labels range over a fixed capacity; some may be empty.
// The description length is that of the degree-corrected block model:
//   S = -E - sum_i ln k_i! - 1/2 sum_rs e_rs ln(e_rs / (e_r e_s))
//       + E h(B(B+1) / 2E) + N ln B,   h(x) = (1+x) ln(1+x) - x ln x,
// with e_rr counting internal edges twice and B the number of non-empty blocks.
class BlockState {
 public:
  // `model_nodes` is the N in the N ln B term (defaults to the graph size).
  BlockState(const ClusterGraph& g, std::vector<BlockId> labels, std::size_t capacity,
             std::size_t model_nodes = 0);

  const ClusterGraph& graph() const { return *g_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t nonempty_blocks() const { return nonempty_; }
  BlockId block_of(NodeId i) const { return labels_[i]; }
  const std::vector<BlockId>& labels() const { return labels_; }
  std::size_t block_size(BlockId r) const { return sizes_[r]; }
  std::uint64_t block_degree(BlockId r) const { return degrees_[r]; }
  std::uint64_t edges_between(BlockId r, BlockId s) const { return matrix_[r * capacity_ + s]; }

  double description_length() const;
  MoveEvaluation evaluate_move(NodeId i, BlockId target) const;
  void move(NodeId i, BlockId target);
  // Change in the likelihood part when block r is merged into block s.
  double merge_delta(BlockId r, BlockId s) const;

 private:
  double model_term(std::size_t blocks) const;
  double f(std::uint64_t x) const { return g_->xlogx(x); }

  const ClusterGraph* g_;
  std::size_t capacity_;
  std::size_t model_nodes_;
  std::vector<BlockId> labels_;
  std::vector<std::size_t> sizes_;
  std::vector<std::uint64_t> degrees_;
  std::vector<std::uint64_t> matrix_;  // capacity x capacity, symmetric
  std::size_t nonempty_ = 0;
  mutable std::vector<std::uint64_t> scratch_;
  mutable std::vector<BlockId> touched_;
};

// Description length of partition p on g.
double objective(const SegmentGraph& g, const Partition& p);

// One Metropolis-Hastings step for `node`. The target block is uniform with
// probability epsilon, otherwise the block of a neighbour drawn by edge
// multiplicity. Since neighbours stay put, the proposal probability
// q(x) = epsilon/B + (1-epsilon) k_ix/k_i does not depend on the node's
// current block, and the move is accepted with probability
// min(1, exp(-beta dS) q(r)/q(s)). beta == 0 accepts every proposal.
// Returns whether the node moved.
bool propose_and_accept(BlockState& state, NodeId node, const ClustererConfig& cfg, Rng& rng);

// Partition-level form of the step above over the partition's own blocks.
Partition propose_and_accept(const Partition& state, NodeId node, const SegmentGraph& g,
                             const ClustererConfig& cfg, Rng& rng);

// Agglomerative block-count search: start from b_max blocks (singletons when
// b_max covers every node), alternate greedy block merges with MCMC sweeps,
// shrink the block count geometrically until the description length stops
// improving, then golden-section search the bracket. Zero-degree nodes join
// block 0. Throws DataError("nothing to cluster") on an empty graph.
Partition cluster(const SegmentGraph& g, const ClustererConfig& cfg);

}  // namespace dynclust
