#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "dynclust/resolver.hpp"
#include "oracles.hpp"

using namespace dynclust;

namespace {

PartitionCloud cloud_of(std::vector<Partition> parts, std::size_t segment = 0) {
  return PartitionCloud{segment, std::move(parts)};
}

Partition relabel(const Partition& p, std::mt19937_64& rng) {
  std::vector<BlockId> perm(p.block_count());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<BlockId> out(p.node_count());
  for (NodeId i = 0; i < p.node_count(); ++i) out[i] = perm[p[i]];
  return Partition(out);
}

// Cloud of noisy copies of a planted partition.
PartitionCloud noisy_cloud(std::size_t n, std::size_t blocks, std::size_t K, double noise, std::mt19937_64& rng) {
  std::vector<Partition> parts;
  std::uniform_real_distribution<double> u(0, 1);
  for (std::size_t k = 0; k < K; ++k) {
    std::vector<BlockId> labels(n);
    for (NodeId i = 0; i < n; ++i) {
      labels[i] = static_cast<BlockId>(i * blocks / n);
      if (u(rng) < noise) labels[i] = static_cast<BlockId>(rng() % blocks);
    }
    parts.emplace_back(labels);
  }
  return cloud_of(parts);
}

}  // namespace

TEST_CASE("similarity examples") {
  const std::vector<NodeId> a{1, 2}, b{3, 4}, c{2, 3};
  CHECK(similarity(a, a) == 1.0);
  CHECK(similarity(a, b) == 0.0);
  CHECK(similarity(a, c) == doctest::Approx(1.0 / 3));
  CHECK(similarity(a, c) == similarity(c, a));
  CHECK_THROWS_AS(similarity({}, {}), DataError);
}

TEST_CASE("identical partitions score 1 everywhere and resolve to themselves") {
  const Partition p({0, 0, 1, 2, 2, 1, 3});
  const auto cloud = cloud_of({p, p, p, p});
  for (const auto& s : score_blocks(cloud)) CHECK(s.score == 1.0);
  CHECK(resolve(cloud).equivalent(p));
}

TEST_CASE("worked example: three partitions over four nodes") {
  const auto cloud = cloud_of({Partition({0, 0, 1, 1}), Partition({0, 0, 1, 1}), Partition({0, 0, 0, 1})});
  const auto scores = score_blocks(cloud);
  REQUIRE(scores.size() == 6);
  CHECK(scores[0].source == BlockRef{0, 0});
  CHECK(scores[0].members == std::vector<NodeId>{0, 1});
  CHECK(scores[0].score == doctest::Approx(5.0 / 6));
  CHECK(median_block_count(cloud) == 2);
  CHECK(resolve(cloud).equivalent(Partition({0, 0, 1, 1})));
}

TEST_CASE("a single partition without context has no expectation") {
  CHECK_THROWS_AS(score_blocks(cloud_of({Partition({0, 1})})), DataError);
  // a context makes it defined
  const std::vector<PartitionCloud> ctx{cloud_of({Partition({0, 1}), Partition({0, 0})}, 1)};
  CHECK_NOTHROW(score_blocks(cloud_of({Partition({0, 1})}), ctx));
}

TEST_CASE("a context identical to the cloud leaves the scores unchanged") {
  std::mt19937_64 rng(4);
  const auto cloud = noisy_cloud(30, 3, 5, 0.2, rng);
  const std::vector<PartitionCloud> ctx{cloud};
  const auto plain = score_blocks(cloud), smoothed = score_blocks(cloud, ctx);
  REQUIRE(plain.size() == smoothed.size());
  for (std::size_t i = 0; i < plain.size(); ++i) CHECK(smoothed[i].score == doctest::Approx(plain[i].score));
  CHECK(resolve(cloud, ctx) == resolve(cloud));
}

TEST_CASE("lower median of block counts") {
  CHECK(median_block_count(cloud_of({Partition({0, 1, 2}), Partition({0, 0, 1})})) == 2);
  CHECK(median_block_count(cloud_of({Partition({0, 1, 2}), Partition({0, 0, 1}), Partition({0, 0, 0}),
                                     Partition({0, 1, 1})})) == 2);
}

TEST_CASE("property: scores lie in [0, 1] and reach 1 only for blocks found everywhere") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + rng() % 10, K = 2 + rng() % 4;
    std::vector<Partition> parts;
    for (std::size_t k = 0; k < K; ++k) parts.push_back(oracle::random_partition(n, 1 + rng() % 4, rng));
    const auto cloud = cloud_of(parts);
    for (const auto& s : score_blocks(cloud)) {
      CHECK(s.score >= 0.0);
      CHECK(s.score <= 1.0);
      bool everywhere = true;
      for (std::size_t l = 0; l < K; ++l) {
        if (l == s.source.partition) continue;
        const auto blocks = blocks_of(parts[l]);
        everywhere = everywhere && std::find(blocks.begin(), blocks.end(), s.members) != blocks.end();
      }
      CHECK((s.score == 1.0) == everywhere);
    }
  }
}

TEST_CASE("property: resolve matches the brute-force reference") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 7, K = 2 + rng() % 3;
    std::vector<Partition> parts;
    for (std::size_t k = 0; k < K; ++k) parts.push_back(oracle::random_partition(n, 1 + rng() % n, rng));
    std::vector<std::vector<Partition>> ctx;
    std::vector<PartitionCloud> ctx_clouds;
    if (trial % 3 == 0) {
      std::vector<Partition> other;
      for (std::size_t k = 0; k < K; ++k) other.push_back(oracle::random_partition(n, 1 + rng() % n, rng));
      ctx.push_back(other);
      ctx_clouds.push_back(cloud_of(other, 1));
    }
    const auto got = resolve(cloud_of(parts), ctx_clouds);
    const auto want = oracle::naive_resolve(parts, ctx);
    CHECK(got.equivalent(want));
    CHECK(got.block_count() == median_block_count(cloud_of(parts)));
  }
}

TEST_CASE("property: resolve ignores block labels and partition order") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + rng() % 20, K = 2 + rng() % 5;
    std::vector<Partition> parts;
    for (std::size_t k = 0; k < K; ++k) parts.push_back(oracle::random_partition(n, 1 + rng() % 5, rng));
    const auto base = resolve(cloud_of(parts));
    std::vector<Partition> shuffled;
    for (const auto& p : parts) shuffled.push_back(relabel(p, rng));
    CHECK(resolve(cloud_of(shuffled)).equivalent(base));
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(resolve(cloud_of(shuffled)).equivalent(base));
  }
}

TEST_CASE("cost estimate examples") {
  const Partition p({0, 0, 1, 1, 2, 2});
  CHECK(resolution_cost_estimate(cloud_of({p, p})) == 2 * 6 * 3);
  CHECK(resolution_cost_estimate(cloud_of({p})) == 0);
}

TEST_CASE("measured intersection work stays within a factor 4 of the estimate") {
  std::mt19937_64 rng(2);
  for (std::size_t n : {1000, 10000}) {
    const auto cloud = noisy_cloud(n, 20, 6, 0.3, rng);
    ResolutionStats stats;
    score_blocks(cloud, {}, &stats);
    const double ratio = static_cast<double>(stats.intersection_work) / static_cast<double>(resolution_cost_estimate(cloud));
    CHECK(ratio >= 0.25);
    CHECK(ratio <= 4.0);
    CHECK(stats.block_comparisons == 6u * 5 * 20 * 20);
  }
}

TEST_CASE("smoothing context takes the neighbouring segments that exist") {
  std::vector<PartitionCloud> clouds;
  for (std::size_t s = 0; s < 4; ++s) clouds.push_back(cloud_of({Partition({0, 1}), Partition({0, 0})}, s));
  const auto edge = smoothing_context(clouds, 0, 1);
  REQUIRE(edge.size() == 1);
  CHECK(edge[0].segment_index == 1);
  const auto mid = smoothing_context(clouds, 2, 1);
  REQUIRE(mid.size() == 2);
  CHECK(mid[0].segment_index == 1);
  CHECK(mid[1].segment_index == 3);
  CHECK(smoothing_context(clouds, 1, 5).size() == 3);
}
