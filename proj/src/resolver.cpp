#include "dynclust/resolver.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace dynclust {

void PartitionCloud::validate() const {
  if (partitions.empty()) throw DataError("partition cloud is empty");
  const std::size_t n = partitions.front().node_count();
  for (const auto& p : partitions) {
    if (p.node_count() != n) throw DataError("partitions in a cloud must share the node universe");
  }
}

double similarity(std::span<const NodeId> x, std::span<const NodeId> y) {
  if (x.empty() && y.empty()) throw DataError("similarity of two empty sets is undefined");
  std::size_t common = 0;
  auto a = x.begin(), b = y.begin();
  while (a != x.end() && b != y.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++common;
      ++a;
      ++b;
    }
  }
  return static_cast<double>(common) / static_cast<double>(x.size() + y.size() - common);
}

namespace {

// A partition together with its member lists.
struct IndexedPartition {
  const Partition* labels;
  std::vector<std::vector<NodeId>> blocks;

  explicit IndexedPartition(const Partition& p) : labels(&p), blocks(blocks_of(p)) {}
};

std::vector<IndexedPartition> index_cloud(const PartitionCloud& c) {
  std::vector<IndexedPartition> out;
  out.reserve(c.size());
  for (const auto& p : c.partitions) out.emplace_back(p);
  return out;
}

// max_y H(x, y) over the blocks y of `other`; x is block `xb` of `own`.
double best_match(const std::vector<NodeId>& x, BlockId xb, const Partition& own, const IndexedPartition& other,
                  ResolutionStats* stats) {
  double best = 0.0;
  for (BlockId yb = 0; yb < other.blocks.size(); ++yb) {
    const auto& y = other.blocks[yb];
    std::size_t common = 0;
    if (x.size() <= y.size()) {
      for (NodeId v : x) common += (*other.labels)[v] == yb;
    } else {
      for (NodeId v : y) common += own[v] == xb;
    }
    if (stats) {
      ++stats->block_comparisons;
      stats->intersection_work += std::min(x.size(), y.size());
    }
    const double h = static_cast<double>(common) / static_cast<double>(x.size() + y.size() - common);
    best = std::max(best, h);
  }
  return best;
}

}  // namespace

std::vector<BlockScore> score_blocks(const PartitionCloud& cloud, std::span<const PartitionCloud> context,
                                     ResolutionStats* stats) {
  cloud.validate();
  for (const auto& c : context) {
    c.validate();
    if (c.node_count() != cloud.node_count()) throw DataError("context cloud has a different node universe");
  }
  const auto current = index_cloud(cloud);
  std::vector<std::vector<IndexedPartition>> scope;
  scope.reserve(context.size());
  for (const auto& c : context) scope.push_back(index_cloud(c));

  std::vector<BlockScore> out;
  std::vector<double> terms;
  for (std::size_t k = 0; k < current.size(); ++k) {
    const Partition& own = *current[k].labels;
    for (BlockId x = 0; x < current[k].blocks.size(); ++x) {
      const auto& members = current[k].blocks[x];
      terms.clear();
      for (std::size_t l = 0; l < current.size(); ++l) {
        if (l != k) terms.push_back(best_match(members, x, own, current[l], stats));
      }
      for (const auto& c : scope) {
        for (std::size_t l = 0; l < c.size(); ++l) {
          if (l != k) terms.push_back(best_match(members, x, own, c[l], stats));
        }
      }
      if (terms.empty()) throw DataError("expectation undefined: no other partitions in scope");
      // summation order fixed by value so the score ignores partition order
      std::sort(terms.begin(), terms.end());
      const double sum = std::accumulate(terms.begin(), terms.end(), 0.0);
      out.push_back({{k, x}, sum / static_cast<double>(terms.size()), members});
    }
  }
  return out;
}

std::size_t median_block_count(const PartitionCloud& cloud) {
  cloud.validate();
  std::vector<std::size_t> counts;
  for (const auto& p : cloud.partitions) counts.push_back(p.block_count());
  std::sort(counts.begin(), counts.end());
  return counts[(counts.size() - 1) / 2];
}

Partition resolve(const PartitionCloud& cloud, std::span<const PartitionCloud> context, ResolutionStats* stats) {
  auto scores = score_blocks(cloud, context, stats);
  const std::size_t target = median_block_count(cloud);
  const std::size_t n = cloud.node_count();

  std::sort(scores.begin(), scores.end(), [](const BlockScore& a, const BlockScore& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.members.size() != b.members.size()) return a.members.size() > b.members.size();
    return a.members < b.members;
  });

  constexpr BlockId unclaimed = std::numeric_limits<BlockId>::max();
  std::vector<BlockId> owner(n, unclaimed);
  std::vector<std::vector<NodeId>> accepted;
  std::vector<std::size_t> accepted_size;

  // first pass: a candidate opens a block only when most of it is unclaimed,
  // so near-copies of accepted blocks do not open fragment blocks; second
  // pass: any unclaimed remainder does
  for (const bool majority : {true, false}) {
    for (const auto& cand : scores) {
      if (accepted.size() == target) break;
      std::vector<NodeId> fresh;
      for (NodeId v : cand.members) {
        if (owner[v] == unclaimed) fresh.push_back(v);
      }
      if (fresh.empty() || (majority && 2 * fresh.size() <= cand.members.size())) continue;
      const auto id = static_cast<BlockId>(accepted.size());
      for (NodeId v : fresh) owner[v] = id;
      accepted.push_back(std::move(fresh));
    }
  }

  if (accepted.size() < target) {
    // every node is claimed; carve further candidates out of accepted blocks
    accepted_size.resize(accepted.size());
    for (std::size_t a = 0; a < accepted.size(); ++a) accepted_size[a] = accepted[a].size();
    std::vector<std::size_t> taken(accepted.size());
    for (const auto& cand : scores) {
      if (accepted_size.size() == target) break;
      std::fill(taken.begin(), taken.end(), 0);
      for (NodeId v : cand.members) ++taken[owner[v]];
      bool keeps_all = true;
      for (std::size_t a = 0; a < accepted_size.size(); ++a) {
        if (taken[a] == accepted_size[a]) keeps_all = false;
      }
      if (!keeps_all) continue;
      const auto id = static_cast<BlockId>(accepted_size.size());
      for (std::size_t a = 0; a < accepted_size.size(); ++a) accepted_size[a] -= taken[a];
      for (NodeId v : cand.members) owner[v] = id;
      accepted_size.push_back(cand.members.size());
      taken.push_back(0);
    }
    return Partition(std::move(owner));
  }

  // attach leftovers against the frozen accepted blocks
  const auto indexed = index_cloud(cloud);
  std::vector<std::vector<std::vector<double>>> sim(accepted.size());
  for (std::size_t a = 0; a < accepted.size(); ++a) {
    sim[a].resize(indexed.size());
    for (std::size_t k = 0; k < indexed.size(); ++k) {
      const auto& ip = indexed[k];
      std::vector<std::size_t> common(ip.blocks.size(), 0);
      for (NodeId v : accepted[a]) ++common[(*ip.labels)[v]];
      sim[a][k].resize(ip.blocks.size());
      for (BlockId y = 0; y < ip.blocks.size(); ++y) {
        sim[a][k][y] = static_cast<double>(common[y]) /
                       static_cast<double>(accepted[a].size() + ip.blocks[y].size() - common[y]);
      }
    }
  }
  std::vector<BlockId> labels(owner);
  for (NodeId v = 0; v < n; ++v) {
    if (owner[v] != unclaimed) continue;
    std::size_t best = 0;
    double best_h = -1.0;
    for (std::size_t a = 0; a < accepted.size(); ++a) {
      double h = 0.0;
      for (std::size_t k = 0; k < indexed.size(); ++k) h = std::max(h, sim[a][k][(*indexed[k].labels)[v]]);
      if (h > best_h || (h == best_h && accepted[a].size() > accepted[best].size())) {
        best = a;
        best_h = h;
      }
    }
    labels[v] = static_cast<BlockId>(best);
  }
  return Partition(std::move(labels));
}

std::uint64_t resolution_cost_estimate(const PartitionCloud& cloud) {
  cloud.validate();
  const std::uint64_t n = cloud.node_count();
  std::uint64_t total = 0;
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    for (std::size_t l = 0; l < cloud.size(); ++l) {
      if (k != l) total += n * std::min(cloud.partitions[k].block_count(), cloud.partitions[l].block_count());
    }
  }
  return total;
}

std::vector<PartitionCloud> smoothing_context(std::span<const PartitionCloud> clouds, std::size_t t,
                                              std::size_t radius) {
  std::vector<PartitionCloud> out;
  const std::size_t lo = t >= radius ? t - radius : 0;
  const std::size_t hi = std::min(clouds.size() - 1, t + radius);
  for (std::size_t s = lo; s <= hi; ++s) {
    if (s != t && !clouds[s].partitions.empty()) out.push_back(clouds[s]);
  }
  return out;
}

}  // namespace dynclust
