#include "dynclust/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dynclust/seeding.hpp"

namespace dynclust {

RateCurve::RateCurve(double constant) : keys_{{0.0, constant}} {}

RateCurve::RateCurve(std::vector<Keyframe> keys) : keys_(std::move(keys)) {
  std::stable_sort(keys_.begin(), keys_.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
  for (const auto& k : keys_) {
    if (!(k.value >= 0) || !std::isfinite(k.value)) throw ConfigError("rates must be finite and non-negative");
  }
}

double RateCurve::operator()(double t) const {
  if (keys_.empty()) return 0.0;
  if (t <= keys_.front().time) return keys_.front().value;
  if (t >= keys_.back().time) return keys_.back().value;
  auto hi = std::upper_bound(keys_.begin(), keys_.end(), t, [](double x, const Keyframe& k) { return x < k.time; });
  auto lo = hi - 1;
  if (hi->time == lo->time) return hi->value;
  const double frac = (t - lo->time) / (hi->time - lo->time);
  return lo->value + (hi->value - lo->value) * frac;
}

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::split: return "split";
    case EventKind::merge: return "merge";
    case EventKind::birth: return "birth";
    case EventKind::death: return "death";
  }
  return "unknown";
}

EventKind event_kind_from_string(const std::string& s) {
  if (s == "split") return EventKind::split;
  if (s == "merge") return EventKind::merge;
  if (s == "birth") return EventKind::birth;
  if (s == "death") return EventKind::death;
  throw ConfigError("unknown event kind '" + s + "'");
}

bool EventSpec::in_transition(std::size_t segment) const {
  const double lo = static_cast<double>(segment);
  return lo < t_end && lo + 1.0 > t_start;
}

BlockModelSchedule::BlockModelSchedule(std::vector<BlockId> assignment, std::vector<double> theta)
    : assignment_(std::move(assignment)), theta_(std::move(theta)) {
  if (assignment_.empty()) throw ConfigError("block model needs at least one node");
  if (theta_.size() != assignment_.size()) throw ConfigError("theta length must equal node count");
  for (double th : theta_) {
    if (!(th > 0) || !std::isfinite(th)) throw ConfigError("theta entries must be positive");
  }
  block_count_ = *std::max_element(assignment_.begin(), assignment_.end()) + 1;
  auto sizes = block_sizes();
  if (std::find(sizes.begin(), sizes.end(), 0u) != sizes.end()) {
    throw ConfigError("block labels must be dense");
  }
  curves_.assign(block_count_ * (block_count_ + 1) / 2, RateCurve(0.0));
}

std::vector<std::size_t> BlockModelSchedule::block_sizes() const {
  std::vector<std::size_t> sizes(block_count_, 0);
  for (auto b : assignment_) ++sizes[b];
  return sizes;
}

std::size_t BlockModelSchedule::pair_index(BlockId r, BlockId s) const {
  if (r >= block_count_ || s >= block_count_) throw ConfigError("block id out of range");
  if (r > s) std::swap(r, s);
  return static_cast<std::size_t>(r) * block_count_ - static_cast<std::size_t>(r) * (r - 1) / 2 + (s - r);
}

void BlockModelSchedule::set_rate(BlockId r, BlockId s, RateCurve curve) {
  curves_[pair_index(r, s)] = std::move(curve);
}

const RateCurve& BlockModelSchedule::rate_curve(BlockId r, BlockId s) const { return curves_[pair_index(r, s)]; }

std::vector<double> BlockModelSchedule::rates_at(double t) const {
  std::vector<double> m(block_count_ * block_count_);
  for (BlockId r = 0; r < block_count_; ++r) {
    for (BlockId s = r; s < block_count_; ++s) {
      const double v = rate(r, s, t);
      m[r * block_count_ + s] = v;
      m[s * block_count_ + r] = v;
    }
  }
  return m;
}

namespace {

// Replaces the keyframes inside [from.time, to.time] with the two ramp ends.
// A constant curve has no time structure to keep, so the ramp replaces it.
RateCurve with_ramp(const RateCurve& curve, Keyframe from, Keyframe to) {
  std::vector<Keyframe> keys;
  if (curve.keyframes().size() > 1) {
    for (const auto& k : curve.keyframes()) {
      if (k.time < from.time || k.time > to.time) keys.push_back(k);
    }
  }
  keys.push_back(from);
  keys.push_back(to);
  return RateCurve(std::move(keys));
}

bool shares_block(const EventSpec& a, const EventSpec& b) {
  for (auto x : a.blocks) {
    if (std::find(b.blocks.begin(), b.blocks.end(), x) != b.blocks.end()) return true;
  }
  return false;
}

}  // namespace

void BlockModelSchedule::record_event(const EventSpec& event) {
  if (!(event.t_start < event.t_end)) throw ConfigError("event window must satisfy t_start < t_end");
  if (event.blocks.empty()) throw ConfigError("event must name at least one block");
  for (auto b : event.blocks) {
    if (b >= block_count_) throw ConfigError("event references unknown block " + std::to_string(b));
  }
  if ((event.kind == EventKind::split || event.kind == EventKind::merge) && event.blocks.size() < 2) {
    throw ConfigError("split and merge events need at least two blocks");
  }
  for (const auto& other : events_) {
    if (shares_block(event, other) && event.t_start < other.t_end && other.t_start < event.t_end) {
      throw ConfigError("overlapping event windows on the same blocks");
    }
  }
  events_.push_back(event);
}

void BlockModelSchedule::add_event(const EventSpec& event, double internal, double external) {
  record_event(event);
  auto ramp = [&](BlockId r, BlockId s, double v0, double v1) {
    auto& c = curves_[pair_index(r, s)];
    c = with_ramp(c, {event.t_start, v0}, {event.t_end, v1});
  };
  switch (event.kind) {
    case EventKind::split:
    case EventKind::merge: {
      const bool split = event.kind == EventKind::split;
      for (std::size_t a = 0; a < event.blocks.size(); ++a) {
        for (std::size_t b = a + 1; b < event.blocks.size(); ++b) {
          ramp(event.blocks[a], event.blocks[b], split ? internal : external, split ? external : internal);
        }
      }
      break;
    }
    case EventKind::birth:
      for (auto b : event.blocks) ramp(b, b, external, internal);
      break;
    case EventKind::death:
      for (auto b : event.blocks) ramp(b, b, internal, external);
      break;
  }
}

void BlockModelSchedule::set_noise_block(std::optional<BlockId> b) {
  if (b && *b >= block_count_) throw ConfigError("noise block out of range");
  noise_block_ = b;
}

Partition BlockModelSchedule::ground_truth(std::size_t segment) const {
  std::vector<BlockId> parent(block_count_);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](BlockId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](BlockId a, BlockId b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  for (const auto& e : events_) {
    const bool started = e.started_by(segment);
    switch (e.kind) {
      case EventKind::split:
        if (!started) for (auto b : e.blocks) unite(e.blocks.front(), b);
        break;
      case EventKind::merge:
        if (started) for (auto b : e.blocks) unite(e.blocks.front(), b);
        break;
      case EventKind::birth:
        if (!started && noise_block_) for (auto b : e.blocks) unite(*noise_block_, b);
        break;
      case EventKind::death:
        if (started && noise_block_) for (auto b : e.blocks) unite(*noise_block_, b);
        break;
    }
  }
  std::vector<BlockId> labels(assignment_.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = find(assignment_[i]);
  return Partition(std::move(labels));
}

bool BlockModelSchedule::in_transition(std::size_t segment) const {
  return std::any_of(events_.begin(), events_.end(), [&](const auto& e) { return e.in_transition(segment); });
}

double BlockModelSchedule::lambda(NodeId i, NodeId j, double t) const {
  return theta_[i] * theta_[j] * rate(assignment_[i], assignment_[j], t);
}

double calibrate_external_rate(const std::vector<BlockId>& assignment, const std::vector<double>& theta,
                               double ratio) {
  if (assignment.size() != theta.size() || assignment.empty()) throw ConfigError("calibration input mismatch");
  if (!(ratio >= 0)) throw ConfigError("edge ratio must be non-negative");
  const std::size_t nb = *std::max_element(assignment.begin(), assignment.end()) + 1;
  std::vector<double> sum(nb, 0.0), sq(nb, 0.0);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    sum[assignment[i]] += theta[i];
    sq[assignment[i]] += theta[i] * theta[i];
  }
  double internal = 0.0, total = 0.0, all_sq = 0.0;
  for (std::size_t r = 0; r < nb; ++r) {
    internal += (sum[r] * sum[r] - sq[r]) / 2.0;
    total += sum[r];
    all_sq += sum[r] * sum[r];
  }
  const double external = (total * total - all_sq) / 2.0;
  if (external <= 0) throw ConfigError("calibration needs at least two blocks");
  if (internal <= 0) throw ConfigError("calibration needs a block with two or more nodes");
  return ratio * internal / external;
}

BlockModelSchedule build_planted_model(const PlantedParams& params) {
  if (params.blocks == 0 || params.nodes < params.blocks) throw ConfigError("planted model needs nodes >= blocks >= 1");
  std::vector<BlockId> assignment(params.nodes);
  // first (nodes % blocks) blocks get one extra node
  const std::size_t base = params.nodes / params.blocks, extra = params.nodes % params.blocks;
  std::size_t i = 0;
  for (std::size_t b = 0; b < params.blocks; ++b) {
    const std::size_t size = base + (b < extra ? 1 : 0);
    for (std::size_t k = 0; k < size; ++k) assignment[i++] = static_cast<BlockId>(b);
  }
  std::vector<double> theta(params.nodes, 1.0);
  BlockModelSchedule model(assignment, theta);
  const double external =
      params.blocks > 1 ? calibrate_external_rate(assignment, theta, params.external_internal_ratio) : 0.0;
  for (BlockId r = 0; r < params.blocks; ++r) {
    for (BlockId s = r; s < params.blocks; ++s) model.set_rate(r, s, RateCurve(r == s ? 1.0 : external));
  }
  return model;
}

BlockModelSchedule build_split_merge_model(const SplitMergeParams& p) {
  if (p.split_size < 2 || p.split_size % 2 != 0) throw ConfigError("split block size must be even and >= 2");
  if (p.merge_block_size == 0) throw ConfigError("merge block size must be positive");
  if (p.constant_blocks > 0 && p.constant_block_size == 0) throw ConfigError("constant block size must be positive");
  if (p.noise_degree_ratio < 0) throw ConfigError("noise degree ratio must be non-negative");

  std::vector<std::size_t> sizes{p.split_size / 2, p.split_size / 2, p.merge_block_size, p.merge_block_size};
  for (std::size_t c = 0; c < p.constant_blocks; ++c) sizes.push_back(p.constant_block_size);
  const bool has_noise = p.noise_nodes > 0;
  if (has_noise) sizes.push_back(p.noise_nodes);

  std::vector<BlockId> assignment;
  for (std::size_t b = 0; b < sizes.size(); ++b) assignment.insert(assignment.end(), sizes[b], static_cast<BlockId>(b));
  const std::size_t n = assignment.size();
  BlockModelSchedule model(assignment, std::vector<double>(n, 1.0));
  const auto nb = static_cast<BlockId>(sizes.size());
  const BlockId structured = has_noise ? nb - 1 : nb;

  // calibrate on the segment-0 communities of the structured nodes: the split
  // halves count as one block, the merging pair as two
  std::vector<BlockId> truth0;
  std::size_t structured_nodes = 0;
  for (BlockId b = 0; b < structured; ++b) {
    truth0.insert(truth0.end(), sizes[b], b == 1 ? 0 : b);
    structured_nodes += sizes[b];
  }
  const double internal = 1.0;
  const double external = calibrate_external_rate(truth0, std::vector<double>(truth0.size(), 1.0),
                                                  p.external_internal_ratio);

  for (BlockId r = 0; r < structured; ++r) {
    for (BlockId s = r; s < structured; ++s) model.set_rate(r, s, RateCurve(r == s ? internal : external));
  }
  model.set_rate(0, 1, RateCurve(internal));  // one community until the split

  if (has_noise) {
    // mean structured degree from structured partners, then solve
    // (S + Z - 1) q = ratio * (d0 + Z q) for the uniform noise rate q
    const double s_count = static_cast<double>(structured_nodes);
    const double z_count = static_cast<double>(p.noise_nodes);
    double d0 = 0.0;
    for (std::size_t i = 0; i < truth0.size(); ++i) {
      const double g = static_cast<double>(std::count(truth0.begin(), truth0.end(), truth0[i]));
      d0 += (g - 1.0) * internal + (s_count - g) * external;
    }
    d0 /= s_count;
    const double denom = s_count + z_count - 1.0 - p.noise_degree_ratio * z_count;
    if (denom <= 0) throw ConfigError("noise degree ratio too large for the noise group size");
    const double q = p.noise_degree_ratio * d0 / denom;
    for (BlockId r = 0; r < nb; ++r) model.set_rate(r, nb - 1, RateCurve(q));
    model.set_noise_block(nb - 1);
  }

  model.add_event({EventKind::split, {0, 1}, p.split_window.first, p.split_window.second}, internal, external);
  model.add_event({EventKind::merge, {2, 3}, p.merge_window.first, p.merge_window.second}, internal, external);
  return model;
}

namespace {

// Sampler for one segment: block pair by aggregate rate, then endpoints by theta.
class PairSampler {
 public:
  PairSampler(const BlockModelSchedule& model, double t) {
    const auto nb = model.block_count();
    members_.resize(nb);
    for (NodeId i = 0; i < model.node_count(); ++i) members_[model.assignment()[i]].push_back(i);
    std::vector<double> sum(nb, 0.0), sq(nb, 0.0);
    for (NodeId i = 0; i < model.node_count(); ++i) {
      sum[model.assignment()[i]] += model.theta()[i];
      sq[model.assignment()[i]] += model.theta()[i] * model.theta()[i];
    }
    std::vector<double> weights;
    for (BlockId r = 0; r < nb; ++r) {
      for (BlockId s = r; s < nb; ++s) {
        const double mass = r == s ? (sum[r] * sum[r] - sq[r]) / 2.0 : sum[r] * sum[s];
        pairs_.emplace_back(r, s);
        weights.push_back(std::max(0.0, mass) * model.rate(r, s, t));
      }
    }
    if (std::accumulate(weights.begin(), weights.end(), 0.0) <= 0.0) throw ConfigError("degenerate model");
    pair_dist_ = std::discrete_distribution<std::size_t>(weights.begin(), weights.end());
    for (BlockId r = 0; r < nb; ++r) {
      std::vector<double> th;
      for (auto i : members_[r]) th.push_back(model.theta()[i]);
      node_dist_.emplace_back(th.begin(), th.end());
    }
  }

  std::pair<NodeId, NodeId> draw(Rng& rng) {
    const auto [r, s] = pairs_[pair_dist_(rng)];
    // Self-loops are rejected by redrawing both ends; redrawing only one end
    // would favour pairs containing a high-theta node.
    while (true) {
      const NodeId i = members_[r][node_dist_[r](rng)];
      const NodeId j = members_[s][node_dist_[s](rng)];
      if (i != j) return {i, j};
    }
  }

 private:
  std::vector<std::vector<NodeId>> members_;
  std::vector<std::pair<BlockId, BlockId>> pairs_;
  std::discrete_distribution<std::size_t> pair_dist_;
  std::vector<std::discrete_distribution<std::size_t>> node_dist_;
};

bool integral(double x) { return std::floor(x) == x; }

Timestamp draw_time(const TimeSegmentation& seg, std::size_t s, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double offset = u(rng) * seg.width;
  Timestamp t = seg.begin(s) + (integral(seg.start) && integral(seg.width) ? std::floor(offset) : offset);
  return std::min(std::max(t, seg.begin(s)), std::nextafter(seg.end(s), seg.begin(s)));
}

}  // namespace

std::vector<std::pair<NodeId, NodeId>> sample_edges(const BlockModelSchedule& model, std::size_t segment,
                                                    std::size_t edge_budget, std::uint64_t seed) {
  if (edge_budget == 0) throw ConfigError("edge budget must be positive");
  PairSampler sampler(model, segment_time(segment));
  Rng rng(seed);
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(edge_budget);
  for (std::size_t e = 0; e < edge_budget; ++e) edges.push_back(sampler.draw(rng));
  return edges;
}

SegmentGraph sample_segment(const BlockModelSchedule& model, std::size_t segment, std::size_t edge_budget,
                            std::uint64_t seed) {
  auto edges = sample_edges(model, segment, edge_budget, seed);
  return SegmentGraph(segment, model.node_count(), edges);
}

DynamicGraph sample_dynamic(const BlockModelSchedule& model, const TimeSegmentation& seg,
                            std::size_t per_segment_budget, std::uint64_t master_seed, std::uint64_t repetition) {
  seg.validate();
  std::vector<TimestampedEdge> out;
  out.reserve(seg.count * per_segment_budget);
  for (std::size_t s = 0; s < seg.count; ++s) {
    const auto edges =
        sample_edges(model, s, per_segment_budget, derive_seed(master_seed, {SeedStream::generation, repetition, s, 0}));
    Rng trng(derive_seed(master_seed, {SeedStream::generation, repetition, s, 1}));
    for (auto [i, j] : edges) out.push_back({i, j, draw_time(seg, s, trng)});
  }
  return DynamicGraph(model.node_count(), std::move(out));
}

std::size_t cross_edge_count(std::size_t per_segment_budget, double cross_fraction) {
  if (!(cross_fraction >= 0.0 && cross_fraction <= 1.0)) throw ConfigError("cross fraction must lie in [0, 1]");
  return static_cast<std::size_t>(std::llround(cross_fraction * static_cast<double>(per_segment_budget)));
}

DynamicGraph inject(const DynamicGraph& real, const TimeSegmentation& seg, const BlockModelSchedule& model,
                    std::size_t per_segment_budget, double cross_fraction, std::uint64_t master_seed,
                    std::uint64_t repetition) {
  if (real.empty() || real.node_count() == 0) throw DataError("cannot inject into an empty graph");
  seg.validate();
  const std::size_t n_cross = cross_edge_count(per_segment_budget, cross_fraction);
  const std::size_t n_model = per_segment_budget - n_cross;
  const auto offset = static_cast<NodeId>(real.node_count());

  std::vector<TimestampedEdge> out(real.edges());
  std::uniform_int_distribution<NodeId> pick_real(0, offset - 1);
  std::uniform_int_distribution<NodeId> pick_syn(0, static_cast<NodeId>(model.node_count() - 1));
  for (std::size_t s = 0; s < seg.count; ++s) {
    Rng trng(derive_seed(master_seed, {SeedStream::injection, repetition, s, 1}));
    if (n_model > 0) {
      const auto edges =
          sample_edges(model, s, n_model, derive_seed(master_seed, {SeedStream::generation, repetition, s, 0}));
      for (auto [i, j] : edges) out.push_back({offset + i, offset + j, draw_time(seg, s, trng)});
    }
    Rng crng(derive_seed(master_seed, {SeedStream::injection, repetition, s, 0}));
    for (std::size_t e = 0; e < n_cross; ++e) {
      const NodeId syn = offset + pick_syn(crng);
      const NodeId other = pick_real(crng);
      out.push_back({syn, other, draw_time(seg, s, trng)});
    }
  }
  return DynamicGraph(real.node_count() + model.node_count(), std::move(out));
}

}  // namespace dynclust
