#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dynclust/core.hpp"

namespace dynclust {

// Schedule time is measured in segment units: segment s spans [s, s+1) and
// is sampled at its midpoint s + 0.5.
inline double segment_time(std::size_t s) { return static_cast<double>(s) + 0.5; }

struct Keyframe {
  double time = 0;
  double value = 0;
  friend bool operator==(const Keyframe&, const Keyframe&) = default;
};

// Piecewise-linear in time, held constant before the first and after the
// last keyframe.
class RateCurve {
 public:
  RateCurve() = default;
  explicit RateCurve(double constant);
  explicit RateCurve(std::vector<Keyframe> keys);

  double operator()(double t) const;
  const std::vector<Keyframe>& keyframes() const { return keys_; }

  friend bool operator==(const RateCurve&, const RateCurve&) = default;

 private:
  std::vector<Keyframe> keys_;
};

enum class EventKind { split, merge, birth, death };

std::string to_string(EventKind kind);
EventKind event_kind_from_string(const std::string& s);

// A community event realized as a linear ramp of block-pair rates over
// [t_start, t_end] (schedule time). Split/merge act on the pairs among
// `blocks`; birth/death act on each listed block's internal rate.
struct EventSpec {
  EventKind kind = EventKind::split;
  std::vector<BlockId> blocks;
  double t_start = 0;
  double t_end = 1;

  // Ground truth during the window is the end-of-transition structure, so a
  // segment counts as "after" once its midpoint passes t_start.
  bool started_by(std::size_t segment) const { return segment_time(segment) > t_start; }
  // Segment interval overlaps the open window (t_start, t_end).
  bool in_transition(std::size_t segment) const;
};

// Time-varying degree-corrected block model. Nodes are grouped into fixed
// model blocks; the interaction matrix between model blocks varies in time.
// The community ground truth is derived from the model blocks and the
// events: split blocks are one community before their split starts, merged
// blocks one community once their merge starts.
class BlockModelSchedule {
 public:
  BlockModelSchedule() = default;
  BlockModelSchedule(std::vector<BlockId> assignment, std::vector<double> theta);

  std::size_t node_count() const { return assignment_.size(); }
  std::size_t block_count() const { return block_count_; }
  const std::vector<BlockId>& assignment() const { return assignment_; }
  const std::vector<double>& theta() const { return theta_; }
  std::vector<std::size_t> block_sizes() const;

  void set_rate(BlockId r, BlockId s, RateCurve curve);
  const RateCurve& rate_curve(BlockId r, BlockId s) const;
  double rate(BlockId r, BlockId s, double t) const { return rate_curve(r, s)(t); }
  // Row-major block_count x block_count matrix of rates at time t.
  std::vector<double> rates_at(double t) const;

  // Adds the event and writes the ramp into the affected rate curves.
  // `internal` and `external` are the two rate levels the ramp moves
  // between. Rejects windows with t_start >= t_end and events that overlap
  // in time with an existing event on a shared block.
  void add_event(const EventSpec& event, double internal, double external);
  // Validates and stores the event without touching the rate curves; used
  // when the curves are restored from a saved schedule.
  void record_event(const EventSpec& event);
  const std::vector<EventSpec>& events() const { return events_; }

  // Optional block of unstructured nodes; inactive (unborn or dead) blocks
  // are folded into it for ground truth.
  void set_noise_block(std::optional<BlockId> b);
  std::optional<BlockId> noise_block() const { return noise_block_; }

  Partition ground_truth(std::size_t segment) const;
  // Segments during which some event is mid-transition.
  bool in_transition(std::size_t segment) const;

  // Rate between nodes i and j at time t: theta_i theta_j Sigma(t).
  double lambda(NodeId i, NodeId j, double t) const;

 private:
  std::size_t pair_index(BlockId r, BlockId s) const;

  std::vector<BlockId> assignment_;
  std::vector<double> theta_;
  std::size_t block_count_ = 0;
  std::vector<RateCurve> curves_;  // upper triangle, row-major
  std::vector<EventSpec> events_;
  std::optional<BlockId> noise_block_;
};

// External rate that makes the expected external/internal edge ratio equal
// `ratio` when internal rate is 1. With Theta_r = sum of theta in block r and
// Q_r = sum of theta^2, expected internal weight is
// sum_r (Theta_r^2 - Q_r)/2 and external weight is sum_{r<s} Theta_r Theta_s,
// so external_rate = ratio * internal_weight / external_weight.
double calibrate_external_rate(const std::vector<BlockId>& assignment, const std::vector<double>& theta,
                               double ratio);

// Static planted partition with `blocks` near-equal blocks.
struct PlantedParams {
  std::size_t nodes = 500;
  std::size_t blocks = 8;
  double external_internal_ratio = 0.2;
};
BlockModelSchedule build_planted_model(const PlantedParams& params);

struct SplitMergeParams {
  std::size_t split_size = 100;           // splits into two equal halves
  std::size_t merge_block_size = 50;      // two of these merge
  std::size_t constant_blocks = 5;
  std::size_t constant_block_size = 50;
  std::size_t noise_nodes = 50;
  std::pair<double, double> split_window{2, 4};
  std::pair<double, double> merge_window{6, 8};
  double external_internal_ratio = 0.2;
  // Expected degree of a noise node relative to the mean structured degree.
  double noise_degree_ratio = 1.0;
};

// Model blocks are laid out contiguously: split halves (0,1), merging pair
// (2,3), constant blocks, then the noise block last (when present).
BlockModelSchedule build_split_merge_model(const SplitMergeParams& params);

// Ordered endpoint draws; pair (i, j), i != j, is drawn with probability
// proportional to lambda_ij at the segment midpoint.
std::vector<std::pair<NodeId, NodeId>> sample_edges(const BlockModelSchedule& model, std::size_t segment,
                                                    std::size_t edge_budget, std::uint64_t seed);

SegmentGraph sample_segment(const BlockModelSchedule& model, std::size_t segment, std::size_t edge_budget,
                            std::uint64_t seed);

// Samples every segment of `seg` into one timestamped stream. Segment s uses
// the generation seed derived for (repetition, s), so its edges equal
// sample_edges() with that seed. Timestamps are uniform inside the segment
// and integral whenever start and width are.
DynamicGraph sample_dynamic(const BlockModelSchedule& model, const TimeSegmentation& seg,
                            std::size_t per_segment_budget, std::uint64_t master_seed,
                            std::uint64_t repetition = 0);

// Appends the model's nodes after the real node range and, per segment of
// `seg`, adds (1 - cross_fraction) * budget model edges plus
// cross_fraction * budget edges between a uniform synthetic node and a
// uniform real node. Real edges are copied untouched.
DynamicGraph inject(const DynamicGraph& real, const TimeSegmentation& seg, const BlockModelSchedule& model,
                    std::size_t per_segment_budget, double cross_fraction, std::uint64_t master_seed,
                    std::uint64_t repetition = 0);

// Number of cross edges per segment for a budget and fraction.
std::size_t cross_edge_count(std::size_t per_segment_budget, double cross_fraction);

}  // namespace dynclust
