#include <doctest.h>

#include <random>
#include <set>

#include "dynclust/core.hpp"
#include "dynclust/seeding.hpp"

using namespace dynclust;

TEST_CASE("slice buckets edges by timestamp and accumulates multiplicity") {
  DynamicGraph g(3, {{0, 1, 0.5}, {0, 1, 0.7}, {1, 2, 1.5}});
  const auto segs = slice(g, {0, 1, 2});
  REQUIRE(segs.size() == 2);
  REQUIRE(segs[0].pairs().size() == 1);
  CHECK(segs[0].pairs()[0] == WeightedPair{0, 1, 2});
  REQUIRE(segs[1].pairs().size() == 1);
  CHECK(segs[1].pairs()[0] == WeightedPair{1, 2, 1});
}

TEST_CASE("slice of an empty edge list gives empty segments") {
  const auto segs = slice(DynamicGraph(4, {}), {0, 2, 3});
  REQUIRE(segs.size() == 3);
  for (std::size_t s = 0; s < 3; ++s) {
    CHECK(segs[s].empty());
    CHECK(segs[s].segment_index() == s);
  }
}

TEST_CASE("slice rejects an edge outside the span and names it") {
  DynamicGraph g(2, {{0, 1, 0.5}, {0, 1, 5.0}});
  try {
    slice(g, {0, 1, 2});
    FAIL("expected EdgeOutOfSpan");
  } catch (const EdgeOutOfSpan& e) {
    CHECK(e.edge_index() == 1);
  }
}

TEST_CASE("segment boundaries are half-open") {
  TimeSegmentation seg{10, 2.5, 4};
  CHECK(seg.segment_of(10.0) == 0u);
  CHECK(seg.segment_of(12.5) == 1u);
  CHECK(seg.segment_of(19.999) == 3u);
  CHECK_FALSE(seg.segment_of(20.0).has_value());
  CHECK_FALSE(seg.segment_of(9.999).has_value());
}

TEST_CASE("segment graphs store undirected pairs once") {
  std::vector<std::pair<NodeId, NodeId>> e{{2, 1}, {1, 2}, {0, 0}};
  SegmentGraph g(0, 3, e);
  REQUIRE(g.pairs().size() == 2);
  CHECK(g.pairs()[0] == WeightedPair{0, 0, 1});
  CHECK(g.pairs()[1] == WeightedPair{1, 2, 2});
  CHECK(g.total_multiplicity() == 3);
}

TEST_CASE("property: slicing preserves total multiplicity") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<NodeId> node(0, 19);
    std::uniform_real_distribution<double> time(0, 10);
    std::vector<TimestampedEdge> edges;
    const std::size_t m = rng() % 200;
    for (std::size_t i = 0; i < m; ++i) edges.push_back({node(rng), node(rng), time(rng)});
    const auto segs = slice(DynamicGraph(20, edges), {0, 1, 10});
    std::uint64_t total = 0;
    for (const auto& s : segs) {
      for (const auto& p : s.pairs()) CHECK(p.multiplicity >= 1);
      total += s.total_multiplicity();
    }
    CHECK(total == m);
  }
}

TEST_CASE("blocks_of examples") {
  using V = std::vector<std::vector<NodeId>>;
  CHECK(blocks_of(Partition({0, 0, 1})) == V{{0, 1}, {2}});
  CHECK(blocks_of(Partition({0, 0, 0})) == V{{0, 1, 2}});
  CHECK(blocks_of(Partition({2, 0, 1})).size() == 3);
}

TEST_CASE("property: blocks_of is a disjoint cover") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 30;
    std::vector<BlockId> labels(n);
    for (auto& l : labels) l = static_cast<BlockId>(rng() % 7) * 3;
    const Partition p(labels);
    std::set<NodeId> seen;
    std::size_t total = 0;
    for (const auto& b : blocks_of(p)) {
      CHECK_FALSE(b.empty());
      total += b.size();
      seen.insert(b.begin(), b.end());
    }
    CHECK(total == n);
    CHECK(seen.size() == n);
  }
}

TEST_CASE("partition labels are densified and equivalence ignores labels") {
  const Partition p({5, 5, 9, 2});
  CHECK(p.block_count() == 3);
  CHECK(p.labels() == std::vector<BlockId>{1, 1, 2, 0});
  CHECK(p.equivalent(Partition({0, 0, 1, 2})));
  CHECK_FALSE(p.equivalent(Partition({0, 1, 1, 2})));
  CHECK(p.canonical().labels() == std::vector<BlockId>{0, 0, 1, 2});
}

TEST_CASE("dynamic graph validates node ids") {
  CHECK_THROWS_AS(DynamicGraph(2, {{0, 2, 0.0}}), DataError);
}

TEST_CASE("derived seeds are distinct across paths and reject overflow") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t stream : {1, 2, 3}) {
    for (std::uint64_t r = 0; r < 4; ++r) {
      for (std::uint64_t s = 0; s < 20; ++s) {
        for (std::uint64_t k = 0; k < 12; ++k) {
          seen.insert(derive_seed(99, {static_cast<SeedStream>(stream), r, s, k}));
        }
      }
    }
  }
  CHECK(seen.size() == 3u * 4 * 20 * 12);
  CHECK(derive_seed(1, {SeedStream::clustering, 2, 3, 4}) == derive_seed(1, {SeedStream::clustering, 2, 3, 4}));
  CHECK_THROWS_AS(derive_seed(1, {SeedStream::clustering, 1u << 16, 0, 0}), ConfigError);
}
