#include "dynclust/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dynclust {

namespace {

std::string out_of_span_message(std::size_t edge_index, Timestamp t) {
  std::ostringstream os;
  os << "edge " << edge_index << " has timestamp " << t << " outside the segmentation span";
  return os.str();
}

}  // namespace

EdgeOutOfSpan::EdgeOutOfSpan(std::size_t edge_index, Timestamp t)
    : DataError(out_of_span_message(edge_index, t)), edge_index_(edge_index) {}

DynamicGraph::DynamicGraph(std::size_t node_count, std::vector<TimestampedEdge> edges)
    : node_count_(node_count), edges_(std::move(edges)) {
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    if (e.src >= node_count_ || e.dst >= node_count_) {
      throw DataError("edge " + std::to_string(i) + " references a node outside [0, " +
                      std::to_string(node_count_) + ")");
    }
    if (!std::isfinite(e.t) || e.t < 0) {
      throw DataError("edge " + std::to_string(i) + " has an invalid timestamp");
    }
  }
}

Timestamp DynamicGraph::min_time() const {
  if (edges_.empty()) throw DataError("empty graph has no time range");
  return std::min_element(edges_.begin(), edges_.end(),
                          [](const auto& a, const auto& b) { return a.t < b.t; })
      ->t;
}

Timestamp DynamicGraph::max_time() const {
  if (edges_.empty()) throw DataError("empty graph has no time range");
  return std::max_element(edges_.begin(), edges_.end(),
                          [](const auto& a, const auto& b) { return a.t < b.t; })
      ->t;
}

void TimeSegmentation::validate() const {
  if (!(width > 0) || !std::isfinite(width)) throw ConfigError("segment width must be positive");
  if (count == 0) throw ConfigError("segment count must be positive");
  if (!std::isfinite(start)) throw ConfigError("segment start must be finite");
}

std::optional<std::size_t> TimeSegmentation::segment_of(Timestamp t) const {
  if (t < start) return std::nullopt;
  const double q = std::floor((t - start) / width);
  auto s = static_cast<std::size_t>(std::min(q, static_cast<double>(count - 1)));
  // the quotient can land one bucket off near boundaries
  while (s > 0 && t < begin(s)) --s;
  while (t >= end(s)) {
    if (s + 1 == count) return std::nullopt;
    ++s;
  }
  return s;
}

SegmentGraph::SegmentGraph(std::size_t segment_index, std::size_t node_count,
                           std::span<const std::pair<NodeId, NodeId>> edges)
    : segment_index_(segment_index), node_count_(node_count) {
  std::vector<std::pair<NodeId, NodeId>> ordered;
  ordered.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a >= node_count || b >= node_count) {
      throw DataError("segment edge references a node outside [0, " + std::to_string(node_count) + ")");
    }
    ordered.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(ordered.begin(), ordered.end());
  for (const auto& [u, v] : ordered) {
    if (!pairs_.empty() && pairs_.back().u == u && pairs_.back().v == v) {
      ++pairs_.back().multiplicity;
    } else {
      pairs_.push_back({u, v, 1});
    }
  }
  total_ = ordered.size();
}

Partition::Partition(std::vector<BlockId> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw DataError("partition must cover at least one node");
  std::vector<BlockId> distinct(labels_);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  block_count_ = distinct.size();
  if (distinct.back() + 1 != distinct.size()) {
    for (auto& l : labels_) {
      l = static_cast<BlockId>(std::lower_bound(distinct.begin(), distinct.end(), l) - distinct.begin());
    }
  }
}

std::vector<std::size_t> Partition::block_sizes() const {
  std::vector<std::size_t> sizes(block_count_, 0);
  for (auto l : labels_) ++sizes[l];
  return sizes;
}

Partition Partition::canonical() const {
  constexpr BlockId unset = std::numeric_limits<BlockId>::max();
  std::vector<BlockId> map(block_count_, unset);
  std::vector<BlockId> out(labels_.size());
  BlockId next = 0;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    auto& m = map[labels_[i]];
    if (m == unset) m = next++;
    out[i] = m;
  }
  return Partition(std::move(out));
}

bool Partition::equivalent(const Partition& other) const {
  return node_count() == other.node_count() && block_count() == other.block_count() &&
         canonical().labels() == other.canonical().labels();
}

std::vector<SegmentGraph> slice(const DynamicGraph& graph, const TimeSegmentation& seg) {
  seg.validate();
  std::vector<std::vector<std::pair<NodeId, NodeId>>> buckets(seg.count);
  const auto& edges = graph.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto s = seg.segment_of(edges[i].t);
    if (!s) throw EdgeOutOfSpan(i, edges[i].t);
    buckets[*s].emplace_back(edges[i].src, edges[i].dst);
  }
  std::vector<SegmentGraph> out;
  out.reserve(seg.count);
  for (std::size_t s = 0; s < seg.count; ++s) {
    out.emplace_back(s, graph.node_count(), buckets[s]);
  }
  return out;
}

DynamicGraph restrict_to_span(const DynamicGraph& graph, const TimeSegmentation& seg) {
  seg.validate();
  std::vector<TimestampedEdge> kept;
  for (const auto& e : graph.edges()) {
    if (seg.segment_of(e.t)) kept.push_back(e);
  }
  return DynamicGraph(graph.node_count(), std::move(kept));
}

std::vector<std::vector<NodeId>> blocks_of(const Partition& p) {
  std::vector<std::vector<NodeId>> blocks(p.block_count());
  for (NodeId i = 0; i < p.node_count(); ++i) blocks[p[i]].push_back(i);
  return blocks;
}

}  // namespace dynclust
