#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "dynclust/generator.hpp"
#include "dynclust/seeding.hpp"
#include "stat_oracles.hpp"

using namespace dynclust;

namespace {

BlockModelSchedule two_blocks(std::size_t per_block, double r00, double r01, double r11) {
  std::vector<BlockId> a(2 * per_block);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = i < per_block ? 0 : 1;
  BlockModelSchedule m(a, std::vector<double>(a.size(), 1.0));
  m.set_rate(0, 0, RateCurve(r00));
  m.set_rate(0, 1, RateCurve(r01));
  m.set_rate(1, 1, RateCurve(r11));
  return m;
}

}  // namespace

TEST_CASE("only the non-zero rate produces edges") {
  const auto m = two_blocks(5, 1.0, 0.0, 0.0);
  for (auto [i, j] : sample_edges(m, 0, 500, 1)) {
    CHECK(i < 5);
    CHECK(j < 5);
    CHECK(i != j);
  }
}

TEST_CASE("all-zero rates are a degenerate model") {
  const auto m = two_blocks(3, 0.0, 0.0, 0.0);
  CHECK_THROWS_WITH_AS(sample_segment(m, 0, 10, 1), "degenerate model", ConfigError);
}

TEST_CASE("sample_segment returns exactly the budget and is deterministic") {
  const auto m = build_planted_model({60, 3, 0.2});
  const auto a = sample_segment(m, 0, 777, 42);
  CHECK(a.total_multiplicity() == 777);
  CHECK(a == sample_segment(m, 0, 777, 42));
  CHECK_FALSE(a == sample_segment(m, 0, 777, 43));
  for (const auto& p : a.pairs()) CHECK(p.u < p.v);
}

TEST_CASE("per-pair frequencies match the normalized rates within 3 standard errors") {
  // two blocks of three, no cross edges: six equally likely pairs
  const auto m = two_blocks(3, 1.0, 0.0, 1.0);
  const std::size_t draws = 100000;
  std::map<std::pair<NodeId, NodeId>, double> count;
  for (auto [i, j] : sample_edges(m, 0, draws, 9)) count[{std::min(i, j), std::max(i, j)}] += 1;
  CHECK(count.size() == 6);
  const double p = 1.0 / 6.0;
  const double se = std::sqrt(p * (1 - p) / static_cast<double>(draws));
  for (const auto& [pair, c] : count) CHECK(std::abs(c / static_cast<double>(draws) - p) < 3 * se);
}

TEST_CASE("chi-square goodness of fit on a 4-block 40-node model") {
  const auto m = oracle::chi_square_model();
  int passed = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) passed += oracle::pair_frequency_test(m, 100000, seed).p_value > 0.01;
  CHECK(passed >= 4);
}

TEST_CASE("pair frequencies stay unbiased at a million draws") {
  // a small per-draw bias only shows once the sample is large
  const auto m = oracle::chi_square_model();
  int passed = 0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) passed += oracle::pair_frequency_test(m, 1000000, seed).p_value > 0.01;
  CHECK(passed >= 2);
}

TEST_CASE("planted model reproduces the 1:5 external/internal ratio") {
  const auto m = build_planted_model({500, 8, 0.2});
  double internal = 0, external = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (auto [i, j] : sample_edges(m, 0, 1900, seed)) {
      (m.assignment()[i] == m.assignment()[j] ? internal : external) += 1;
    }
  }
  CHECK(external / internal == doctest::Approx(0.2).epsilon(0.05));
}

TEST_CASE("external rate calibration is the closed-form proportion") {
  // two blocks of two: internal weight 2, external weight 4
  CHECK(calibrate_external_rate({0, 0, 1, 1}, {1, 1, 1, 1}, 0.2) == doctest::Approx(0.1));
}

TEST_CASE("split/merge schedule: sizes and ground truth block counts") {
  const auto m = build_split_merge_model({});
  CHECK(m.node_count() == 500);
  CHECK(m.ground_truth(0).block_count() == 9);
  CHECK(m.ground_truth(9).block_count() == 9);
  // after the split starts and before the merge starts: two children and two merging blocks
  CHECK(m.ground_truth(4).block_count() == 10);
  for (std::size_t s : {2, 3, 6, 7}) CHECK(m.in_transition(s));
  for (std::size_t s : {0, 1, 4, 5, 8, 9}) CHECK_FALSE(m.in_transition(s));
  // end-of-transition convention: segment 2 already shows the split
  CHECK(m.ground_truth(2).block_count() == 10);
  CHECK(m.ground_truth(6).block_count() == 9);
}

TEST_CASE("split ramp endpoints and midpoint are exact") {
  const auto m = build_split_merge_model({});
  const double internal = m.rate(0, 0, 0.0);
  const double external = m.rate(0, 4, 0.0);
  CHECK(m.rate(0, 1, 0.0) == internal);
  CHECK(m.rate(0, 1, 2.0) == internal);
  CHECK(m.rate(0, 1, 4.0) == external);
  CHECK(m.rate(0, 1, 9.5) == external);
  CHECK(m.rate(0, 1, 3.0) == doctest::Approx((internal + external) / 2));
  // merge ramps the other way
  CHECK(m.rate(2, 3, 6.0) == external);
  CHECK(m.rate(2, 3, 8.0) == internal);
  // symmetric lookup
  CHECK(m.rate(1, 0, 3.0) == m.rate(0, 1, 3.0));
}

TEST_CASE("overlapping windows on shared blocks are rejected") {
  auto m = build_split_merge_model({});
  CHECK_THROWS_AS(m.add_event({EventKind::merge, {1, 2}, 3, 5}, 1.0, 0.1), ConfigError);
  CHECK_THROWS_AS(m.add_event({EventKind::split, {4, 5}, 5, 5}, 1.0, 0.1), ConfigError);
  // disjoint in time is fine
  CHECK_NOTHROW(m.add_event({EventKind::merge, {0, 1}, 8, 9}, 1.0, 0.1));
}

TEST_CASE("birth and death fold inactive blocks into noise") {
  BlockModelSchedule m({0, 0, 1, 1, 2, 2}, std::vector<double>(6, 1.0));
  for (BlockId r = 0; r < 3; ++r) {
    for (BlockId s = r; s < 3; ++s) m.set_rate(r, s, RateCurve(r == s ? 1.0 : 0.1));
  }
  m.set_noise_block(2);
  m.add_event({EventKind::birth, {0}, 2, 4}, 1.0, 0.1);
  m.add_event({EventKind::death, {1}, 5, 6}, 1.0, 0.1);
  CHECK(m.ground_truth(0).block_count() == 2);  // block 0 unborn
  CHECK(m.ground_truth(3).block_count() == 3);
  CHECK(m.ground_truth(7).block_count() == 2);  // block 1 dead
  CHECK(m.rate(0, 0, 1.0) == doctest::Approx(0.1));
  CHECK(m.rate(1, 1, 7.0) == doctest::Approx(0.1));
}

TEST_CASE("sample_dynamic timestamps are integral and inside their segment") {
  const auto m = build_split_merge_model({});
  const TimeSegmentation seg{100, 10, 4};
  const auto g = sample_dynamic(m, seg, 50, 3);
  CHECK(g.edge_count() == 200);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto t = g.edges()[e].t;
    CHECK(t == std::floor(t));
    CHECK(seg.segment_of(t) == e / 50);
  }
}

TEST_CASE("injection splits the budget into model and cross edges") {
  const auto model = build_split_merge_model({});
  DynamicGraph real(30, {{0, 1, 0}, {2, 3, 15}, {4, 5, 25}});
  const TimeSegmentation seg{0, 10, 3};
  const auto g = inject(real, seg, model, 960, 160.0 / 960.0, 5);
  CHECK(g.node_count() == 530);
  const auto segs = slice(g, seg);
  for (const auto& s : segs) {
    std::uint64_t syn = 0, cross = 0, real_only = 0;
    for (const auto& p : s.pairs()) {
      const bool a = p.u >= 30, b = p.v >= 30;
      (a && b ? syn : (a || b ? cross : real_only)) += p.multiplicity;
    }
    CHECK(syn == 800);
    CHECK(cross == 160);
    CHECK(real_only == 1);
  }
  // real edges are copied untouched
  CHECK(std::equal(real.edges().begin(), real.edges().end(), g.edges().begin()));
}

TEST_CASE("injection with no cross edges is a pure model sample") {
  const auto model = build_split_merge_model({});
  DynamicGraph real(10, {{0, 1, 0}});
  const TimeSegmentation seg{0, 1, 3};
  const auto g = inject(real, seg, model, 300, 0.0, 8);
  const auto segs = slice(g, seg);
  for (std::size_t s = 0; s < 3; ++s) {
    const auto pure = sample_edges(model, s, 300, derive_seed(8, {SeedStream::generation, 0, s, 0}));
    std::vector<std::pair<NodeId, NodeId>> shifted;
    for (auto [i, j] : pure) shifted.emplace_back(i + 10, j + 10);
    SegmentGraph expected(s, 510, shifted);
    std::vector<WeightedPair> synthetic;
    for (const auto& p : segs[s].pairs()) {
      if (p.u >= 10) synthetic.push_back(p);
    }
    CHECK(synthetic == expected.pairs());
  }
}

TEST_CASE("injection with only cross edges has no synthetic pairs") {
  const auto model = build_split_merge_model({});
  DynamicGraph real(10, {{0, 1, 0}});
  const auto g = inject(real, {0, 1, 2}, model, 100, 1.0, 8);
  for (const auto& e : g.edges()) CHECK_FALSE((e.src >= 10 && e.dst >= 10));
  CHECK(g.edge_count() == 201);
  CHECK_THROWS_AS(inject(DynamicGraph(), {0, 1, 2}, model, 100, 0.5, 8), DataError);
}
