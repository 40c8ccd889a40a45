#include "dynclust/clusterer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

namespace dynclust {

void ClustererConfig::validate(std::size_t node_count) const {
  if (sweeps == 0) throw ConfigError("sweeps must be >= 1");
  if (!(beta >= 0)) throw ConfigError("beta must be >= 0");
  if (b_min == 0) throw ConfigError("b_min must be >= 1");
  if (b_max != 0 && b_min > b_max) throw ConfigError("b_min must not exceed b_max");
  if (b_max > node_count) throw ConfigError("b_max must not exceed the node count");
  if (!(epsilon > 0 && epsilon <= 1)) throw ConfigError("epsilon must lie in (0, 1]");
  if (merge_proposals == 0) throw ConfigError("merge_proposals must be >= 1");
  if (!(reduction_rate > 0 && reduction_rate < 1)) throw ConfigError("reduction_rate must lie in (0, 1)");
  if (!(convergence_tol >= 0)) throw ConfigError("convergence_tol must be >= 0");
  if (max_initial_blocks == 0) throw ConfigError("max_initial_blocks must be >= 1");
}

ClusterGraph::ClusterGraph(const SegmentGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::size_t> deg(n, 0);
  for (const auto& p : g.pairs()) {
    if (p.u == p.v) continue;
    deg[p.u] += p.multiplicity;
    deg[p.v] += p.multiplicity;
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + deg[i];
  adjacency_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& p : g.pairs()) {
    if (p.u == p.v) continue;
    for (std::uint64_t m = 0; m < p.multiplicity; ++m) {
      adjacency_[fill[p.u]++] = p.v;
      adjacency_[fill[p.v]++] = p.u;
    }
  }
  xlogx_.resize(adjacency_.size() + 1);
  xlogx_[0] = 0.0;
  for (std::size_t x = 1; x < xlogx_.size(); ++x) {
    const double v = static_cast<double>(x);
    xlogx_[x] = v * std::log(v);
  }
  degree_term_ = -static_cast<double>(edge_weight());
  for (std::size_t i = 0; i < n; ++i) degree_term_ -= std::lgamma(static_cast<double>(deg[i]) + 1.0);
}

BlockState::BlockState(const ClusterGraph& g, std::vector<BlockId> labels, std::size_t capacity,
                       std::size_t model_nodes)
    : g_(&g),
      capacity_(capacity),
      model_nodes_(model_nodes == 0 ? g.node_count() : model_nodes),
      labels_(std::move(labels)),
      sizes_(capacity, 0),
      degrees_(capacity, 0),
      matrix_(capacity * capacity, 0),
      scratch_(capacity, 0) {
  if (labels_.size() != g.node_count()) throw DataError("label vector does not match the graph");
  for (NodeId i = 0; i < labels_.size(); ++i) {
    const BlockId r = labels_[i];
    if (r >= capacity_) throw DataError("block label exceeds the state capacity");
    ++sizes_[r];
    degrees_[r] += g.degree(i);
    for (NodeId j : g.neighbors(i)) ++matrix_[r * capacity_ + labels_[j]];
  }
  nonempty_ = static_cast<std::size_t>(std::count_if(sizes_.begin(), sizes_.end(), [](auto s) { return s > 0; }));
}

double BlockState::model_term(std::size_t blocks) const {
  const double b = static_cast<double>(blocks);
  const double e = static_cast<double>(g_->edge_weight());
  double term = static_cast<double>(model_nodes_) * std::log(b);
  if (e > 0) {
    const double x = b * (b + 1.0) / (2.0 * e);
    term += e * ((1.0 + x) * std::log1p(x) - x * std::log(x));
  }
  return term;
}

double BlockState::description_length() const {
  double t = 0.0, d = 0.0;
  for (auto m : matrix_) t += f(m);
  for (auto k : degrees_) d += f(k);
  return g_->degree_term() - 0.5 * t + d + model_term(nonempty_);
}

MoveEvaluation BlockState::evaluate_move(NodeId i, BlockId s) const {
  const BlockId r = labels_[i];
  MoveEvaluation ev;
  if (r == s) return ev;
  for (NodeId j : g_->neighbors(i)) {
    const BlockId t = labels_[j];
    if (scratch_[t]++ == 0) touched_.push_back(t);
  }
  const std::uint64_t k = g_->degree(i);
  ev.to_source = scratch_[r];
  ev.to_target = scratch_[s];
  auto m = [&](BlockId a, BlockId b) { return matrix_[a * capacity_ + b]; };

  double dt = 0.0;
  for (BlockId t : touched_) {
    if (t != r && t != s) {
      const std::uint64_t w = scratch_[t];
      const std::uint64_t mrt = m(r, t), mst = m(s, t);
      dt += 2.0 * (f(mrt - w) - f(mrt) + f(mst + w) - f(mst));
    }
    scratch_[t] = 0;
  }
  touched_.clear();
  const std::uint64_t mrr = m(r, r), mss = m(s, s), mrs = m(r, s);
  dt += f(mrr - 2 * ev.to_source) - f(mrr) + f(mss + 2 * ev.to_target) - f(mss) +
        2.0 * (f(mrs + ev.to_source - ev.to_target) - f(mrs));
  const double dd = f(degrees_[r] - k) - f(degrees_[r]) + f(degrees_[s] + k) - f(degrees_[s]);

  std::size_t blocks_after = nonempty_;
  if (sizes_[r] == 1) --blocks_after;
  if (sizes_[s] == 0) ++blocks_after;
  const double dm = blocks_after == nonempty_ ? 0.0 : model_term(blocks_after) - model_term(nonempty_);
  ev.delta = -0.5 * dt + dd + dm;
  return ev;
}

void BlockState::move(NodeId i, BlockId s) {
  const BlockId r = labels_[i];
  if (r == s) return;
  for (NodeId j : g_->neighbors(i)) {
    const BlockId t = labels_[j];
    --matrix_[r * capacity_ + t];
    --matrix_[t * capacity_ + r];
    ++matrix_[s * capacity_ + t];
    ++matrix_[t * capacity_ + s];
  }
  const std::uint64_t k = g_->degree(i);
  degrees_[r] -= k;
  degrees_[s] += k;
  if (--sizes_[r] == 0) --nonempty_;
  if (sizes_[s]++ == 0) ++nonempty_;
  labels_[i] = s;
}

double BlockState::merge_delta(BlockId r, BlockId s) const {
  if (r == s) return 0.0;
  auto m = [&](BlockId a, BlockId b) { return matrix_[a * capacity_ + b]; };
  double dt = 0.0;
  for (BlockId t = 0; t < capacity_; ++t) {
    if (t == r || t == s) continue;
    const std::uint64_t mrt = m(r, t);
    if (mrt == 0) continue;
    const std::uint64_t mst = m(s, t);
    dt += 2.0 * (f(mrt + mst) - f(mrt) - f(mst));
  }
  const std::uint64_t mrr = m(r, r), mss = m(s, s), mrs = m(r, s);
  dt += f(mrr + mss + 2 * mrs) - f(mrr) - f(mss) - 2.0 * f(mrs);
  const double dd = f(degrees_[r] + degrees_[s]) - f(degrees_[r]) - f(degrees_[s]);
  return -0.5 * dt + dd;
}

double objective(const SegmentGraph& g, const Partition& p) {
  if (p.node_count() != g.node_count()) throw DataError("partition does not match the graph");
  ClusterGraph cg(g);
  BlockState st(cg, p.labels(), p.block_count());
  return st.description_length();
}

namespace {

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

template <class T>
T uniform_below(Rng& rng, T n) {
  return std::uniform_int_distribution<T>(0, n - 1)(rng);
}

}  // namespace

bool propose_and_accept(BlockState& state, NodeId node, const ClustererConfig& cfg, Rng& rng) {
  const auto& g = state.graph();
  const auto blocks = static_cast<BlockId>(state.capacity());
  const std::uint64_t k = g.degree(node);
  BlockId target;
  if (k == 0 || uniform01(rng) < cfg.epsilon) {
    target = uniform_below(rng, blocks);
  } else {
    auto nb = g.neighbors(node);
    target = state.block_of(nb[uniform_below(rng, nb.size())]);
  }
  const BlockId source = state.block_of(node);
  if (target == source) return false;
  if (!cfg.allow_vacate && state.block_size(source) == 1) return false;

  const MoveEvaluation ev = state.evaluate_move(node, target);
  bool accept;
  if (cfg.beta == 0.0) {
    accept = true;
  } else if (std::isinf(cfg.beta)) {
    accept = ev.delta <= 0.0;
  } else {
    double hastings = 1.0;
    if (k > 0) {
      const double eps_b = cfg.epsilon / static_cast<double>(blocks);
      const double kd = static_cast<double>(k);
      const double q_back = eps_b + (1.0 - cfg.epsilon) * static_cast<double>(ev.to_source) / kd;
      const double q_fwd = eps_b + (1.0 - cfg.epsilon) * static_cast<double>(ev.to_target) / kd;
      hastings = q_back / q_fwd;
    }
    const double log_a = -cfg.beta * ev.delta + std::log(hastings);
    accept = log_a >= 0.0 || uniform01(rng) < std::exp(log_a);
  }
  if (accept) state.move(node, target);
  return accept;
}

Partition propose_and_accept(const Partition& state, NodeId node, const SegmentGraph& g,
                             const ClustererConfig& cfg, Rng& rng) {
  if (state.node_count() != g.node_count()) throw DataError("partition does not match the graph");
  if (node >= g.node_count()) throw DataError("node out of range");
  ClusterGraph cg(g);
  BlockState st(cg, state.labels(), state.block_count());
  propose_and_accept(st, node, cfg, rng);
  return Partition(st.labels());
}

namespace {

struct Level {
  std::size_t blocks = 0;
  std::vector<BlockId> labels;
  double dl = 0;
};

class BlockCountSearch {
 public:
  BlockCountSearch(const ClusterGraph& g, const ClustererConfig& cfg, std::size_t model_nodes)
      : g_(g), cfg_(cfg), model_nodes_(model_nodes), rng_(cfg.rng_seed) {}

  std::vector<BlockId> run(std::size_t b_min, std::size_t b_max);

 private:
  std::vector<BlockId> merge_down(std::vector<BlockId> labels, std::size_t blocks, std::size_t target);
  BlockId propose_merge(const BlockState& st, BlockId r, const std::vector<std::vector<NodeId>>& members);
  Level sweep(std::vector<BlockId> labels, std::size_t blocks);
  void record(Level lv);

  const ClusterGraph& g_;
  const ClustererConfig& cfg_;
  std::size_t model_nodes_;
  Rng rng_;
  std::optional<Level> hi_, mid_, lo_;
};

BlockId BlockCountSearch::propose_merge(const BlockState& st, BlockId r,
                                        const std::vector<std::vector<NodeId>>& members) {
  const auto blocks = static_cast<BlockId>(st.capacity());
  if (uniform01(rng_) >= cfg_.epsilon && st.block_degree(r) > st.edges_between(r, r)) {
    const auto& mem = members[r];
    for (int attempt = 0; attempt < 8; ++attempt) {
      const NodeId i = mem[uniform_below(rng_, mem.size())];
      auto nb = g_.neighbors(i);
      if (nb.empty()) continue;
      const BlockId s = st.block_of(nb[uniform_below(rng_, nb.size())]);
      if (s != r) return s;
    }
  }
  BlockId s = uniform_below(rng_, static_cast<BlockId>(blocks - 1));
  return s >= r ? s + 1 : s;
}

std::vector<BlockId> BlockCountSearch::merge_down(std::vector<BlockId> labels, std::size_t blocks,
                                                  std::size_t target) {
  while (blocks > target) {
    BlockState st(g_, labels, blocks, model_nodes_);
    std::vector<std::vector<NodeId>> members(blocks);
    for (NodeId i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);

    std::vector<double> best(blocks, std::numeric_limits<double>::infinity());
    std::vector<BlockId> best_target(blocks, 0);
    for (BlockId r = 0; r < blocks; ++r) {
      for (std::size_t p = 0; p < cfg_.merge_proposals; ++p) {
        const BlockId s = propose_merge(st, r, members);
        const double d = st.merge_delta(r, s);
        if (d < best[r]) {
          best[r] = d;
          best_target[r] = s;
        }
      }
    }
    std::vector<BlockId> order(blocks);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](BlockId a, BlockId b) { return best[a] < best[b]; });

    std::vector<BlockId> parent(blocks);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](BlockId x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    std::size_t merged = 0;
    for (BlockId r : order) {
      if (merged == blocks - target) break;
      const BlockId a = find(r), b = find(best_target[r]);
      if (a == b) continue;
      parent[a] = b;
      ++merged;
    }
    std::vector<BlockId> dense(blocks, std::numeric_limits<BlockId>::max());
    BlockId next = 0;
    for (BlockId r = 0; r < blocks; ++r) {
      const BlockId root = find(r);
      if (dense[root] == std::numeric_limits<BlockId>::max()) dense[root] = next++;
    }
    for (auto& l : labels) l = dense[find(l)];
    blocks -= merged;
  }
  return labels;
}

Level BlockCountSearch::sweep(std::vector<BlockId> labels, std::size_t blocks) {
  BlockState st(g_, std::move(labels), blocks, model_nodes_);
  const std::size_t n = g_.node_count();
  // with one node per block every move would vacate its source
  if (blocks < n || cfg_.allow_vacate) {
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), 0);
    ClustererConfig step = cfg_;
    const std::size_t ramp = std::max<std::size_t>(1, cfg_.sweeps / 2);
    std::vector<double> history{st.description_length()};
    for (std::size_t s = 0; s < cfg_.sweeps; ++s) {
      if (cfg_.anneal) step.beta = cfg_.beta * std::min(1.0, static_cast<double>(s + 1) / static_cast<double>(ramp));
      std::shuffle(order.begin(), order.end(), rng_);
      for (NodeId i : order) propose_and_accept(st, i, step, rng_);
      history.push_back(st.description_length());
      const bool annealed = !cfg_.anneal || s + 1 >= ramp;
      if (annealed && history.size() > 3) {
        const double recent = (history[history.size() - 4] - history.back()) / 3.0;
        if (recent < cfg_.convergence_tol * std::abs(history.back())) break;
      }
    }
  }
  return Level{blocks, st.labels(), st.description_length()};
}

void BlockCountSearch::record(Level lv) {
  if (!mid_ || lv.dl < mid_->dl) {
    if (mid_) {
      if (lv.blocks < mid_->blocks) {
        hi_ = std::move(mid_);
      } else {
        lo_ = std::move(mid_);
      }
    }
    mid_ = std::move(lv);
  } else if (lv.blocks < mid_->blocks) {
    lo_ = std::move(lv);
  } else {
    hi_ = std::move(lv);
  }
}

std::vector<BlockId> BlockCountSearch::run(std::size_t b_min, std::size_t b_max) {
  const std::size_t n = g_.node_count();
  std::vector<BlockId> initial(n);
  std::iota(initial.begin(), initial.end(), 0);
  if (b_max < n) {
    std::shuffle(initial.begin(), initial.end(), rng_);
    for (auto& l : initial) l = static_cast<BlockId>(l % b_max);
  }
  record(sweep(std::move(initial), b_max));

  while (true) {
    const std::size_t mid_b = mid_->blocks;
    const std::size_t hi_b = hi_ ? hi_->blocks : mid_b;
    const std::size_t lo_b = lo_ ? lo_->blocks : mid_b;
    const Level* start;
    std::size_t target;
    if (!lo_ && mid_b > b_min) {
      start = &*mid_;
      target = std::max(b_min, static_cast<std::size_t>(std::floor(static_cast<double>(mid_b) *
                                                                   (1.0 - cfg_.reduction_rate))));
      if (target >= mid_b) target = mid_b - 1;
    } else {
      const std::size_t upper = hi_b - mid_b, lower = mid_b - lo_b;
      if (upper <= 1 && lower <= 1) break;
      // golden-section step inside the larger half of the bracket
      if (upper >= lower) {
        start = &*hi_;
        target = mid_b + std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(upper * 0.618)));
        if (target >= hi_b) target = hi_b - 1;
      } else {
        start = &*mid_;
        target = lo_b + std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(lower * 0.618)));
        if (target >= mid_b) target = mid_b - 1;
      }
    }
    auto merged = merge_down(start->labels, start->blocks, target);
    record(sweep(std::move(merged), target));
  }
  return mid_->labels;
}

}  // namespace

Partition cluster(const SegmentGraph& g, const ClustererConfig& cfg) {
  if (g.empty()) throw DataError("nothing to cluster");
  cfg.validate(g.node_count());

  const std::size_t n = g.node_count();
  std::vector<std::uint64_t> degree(n, 0);
  for (const auto& p : g.pairs()) {
    if (p.u == p.v) continue;
    degree[p.u] += p.multiplicity;
    degree[p.v] += p.multiplicity;
  }
  std::vector<NodeId> active;
  std::vector<NodeId> compact(n, std::numeric_limits<NodeId>::max());
  for (NodeId i = 0; i < n; ++i) {
    if (degree[i] > 0) {
      compact[i] = static_cast<NodeId>(active.size());
      active.push_back(i);
    }
  }
  std::vector<BlockId> out(n, 0);
  if (active.empty()) return Partition(std::move(out));

  std::vector<std::pair<NodeId, NodeId>> edges;
  for (const auto& p : g.pairs()) {
    if (p.u == p.v) continue;
    for (std::uint64_t m = 0; m < p.multiplicity; ++m) edges.emplace_back(compact[p.u], compact[p.v]);
  }
  const SegmentGraph sub(g.segment_index(), active.size(), edges);
  const ClusterGraph cg(sub);

  const std::size_t na = active.size();
  const std::size_t b_max = cfg.b_max == 0 ? std::min(na, cfg.max_initial_blocks) : std::min(cfg.b_max, na);
  const std::size_t b_min = std::min(cfg.b_min, b_max);

  BlockCountSearch search(cg, cfg, n);
  const Partition found = Partition(search.run(b_min, b_max)).canonical();
  for (std::size_t a = 0; a < na; ++a) out[active[a]] = found[static_cast<NodeId>(a)];
  return Partition(std::move(out));
}

}  // namespace dynclust
