#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynclust {

using NodeId = std::uint32_t;
using BlockId = std::uint32_t;
using Timestamp = double;

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (files, edge lists, partitions).
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid experiment or tool configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An edge whose timestamp falls outside the segmentation span.
class EdgeOutOfSpan : public DataError {
 public:
  EdgeOutOfSpan(std::size_t edge_index, Timestamp t);
  std::size_t edge_index() const { return edge_index_; }

 private:
  std::size_t edge_index_;
};

struct TimestampedEdge {
  NodeId src = 0;
  NodeId dst = 0;
  Timestamp t = 0;

  friend bool operator==(const TimestampedEdge&, const TimestampedEdge&) = default;
};

// Timestamped multigraph over dense node ids [0, node_count).
class DynamicGraph {
 public:
  DynamicGraph() = default;
  DynamicGraph(std::size_t node_count, std::vector<TimestampedEdge> edges);

  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<TimestampedEdge>& edges() const { return edges_; }
  bool empty() const { return edges_.empty(); }

  // Smallest and largest timestamp; throws on an empty graph.
  Timestamp min_time() const;
  Timestamp max_time() const;

 private:
  std::size_t node_count_ = 0;
  std::vector<TimestampedEdge> edges_;
};

// Uniform, non-overlapping segments: segment s covers
// [start + s*width, start + (s+1)*width).
struct TimeSegmentation {
  Timestamp start = 0;
  Timestamp width = 1;
  std::size_t count = 1;

  void validate() const;
  Timestamp begin(std::size_t s) const { return start + static_cast<double>(s) * width; }
  Timestamp end(std::size_t s) const { return begin(s + 1); }
  Timestamp midpoint(std::size_t s) const { return start + (static_cast<double>(s) + 0.5) * width; }
  Timestamp span_end() const { return end(count - 1); }
  std::optional<std::size_t> segment_of(Timestamp t) const;
};

struct WeightedPair {
  NodeId u = 0;  // u <= v
  NodeId v = 0;
  std::uint64_t multiplicity = 0;

  friend bool operator==(const WeightedPair&, const WeightedPair&) = default;
};

// One segment of the edge stream, collapsed to an undirected multigraph.
// Pairs are stored once with u <= v, sorted, multiplicity >= 1.
class SegmentGraph {
 public:
  SegmentGraph() = default;
  SegmentGraph(std::size_t segment_index, std::size_t node_count,
               std::span<const std::pair<NodeId, NodeId>> edges);

  std::size_t segment_index() const { return segment_index_; }
  std::size_t node_count() const { return node_count_; }
  const std::vector<WeightedPair>& pairs() const { return pairs_; }
  std::uint64_t total_multiplicity() const { return total_; }
  bool empty() const { return pairs_.empty(); }

  friend bool operator==(const SegmentGraph&, const SegmentGraph&) = default;

 private:
  std::size_t segment_index_ = 0;
  std::size_t node_count_ = 0;
  std::vector<WeightedPair> pairs_;
  std::uint64_t total_ = 0;
};

// Total assignment of nodes to blocks with labels dense in [0, block_count).
class Partition {
 public:
  Partition() = default;
  // Labels may be arbitrary; they are densified preserving their relative
  // order, so [2,0,1] becomes three singleton blocks labelled as given.
  explicit Partition(std::vector<BlockId> labels);

  std::size_t node_count() const { return labels_.size(); }
  std::size_t block_count() const { return block_count_; }
  BlockId operator[](NodeId i) const { return labels_[i]; }
  const std::vector<BlockId>& labels() const { return labels_; }
  std::vector<std::size_t> block_sizes() const;

  // Relabelled so blocks are numbered in order of first appearance.
  Partition canonical() const;

  // Same blocks up to label permutation.
  bool equivalent(const Partition& other) const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<BlockId> labels_;
  std::size_t block_count_ = 0;
};

std::vector<SegmentGraph> slice(const DynamicGraph& graph, const TimeSegmentation& seg);

// Edges whose timestamps fall inside the segmentation span.
DynamicGraph restrict_to_span(const DynamicGraph& graph, const TimeSegmentation& seg);

// Block x holds exactly the nodes labelled x, in ascending order.
std::vector<std::vector<NodeId>> blocks_of(const Partition& p);

}  // namespace dynclust
