#include <doctest.h>

#include <fstream>
#include <sstream>

#include "dynclust/flow.hpp"
#include "dynclust/generator.hpp"

using namespace dynclust;

namespace {

std::vector<Partition> split_merge_truth() {
  const auto model = build_split_merge_model({});
  std::vector<Partition> out;
  for (std::size_t s = 0; s < 10; ++s) out.push_back(model.ground_truth(s));
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("identical partitions continue every community") {
  const Partition p({0, 0, 1, 1, 1, 2});
  const auto fg = build_flow({p, p});
  CHECK(fg.nodes.size() == 6);
  REQUIRE(fg.edges.size() == 3);
  for (const auto& e : fg.edges) CHECK(e.overlap == fg.nodes[e.from].size);
}

TEST_CASE("a split gives two equal edges with equal pen widths") {
  std::vector<BlockId> before(100, 0), after(100, 0);
  for (NodeId i = 50; i < 100; ++i) after[i] = 1;
  const auto fg = build_flow({Partition(before), Partition(after)});
  REQUIRE(fg.edges.size() == 2);
  CHECK(fg.edges[0].overlap == 50);
  CHECK(fg.edges[1].overlap == 50);
  CHECK(fg.out_degree(0) == 2);
  const auto dot = emit_dot(fg);
  CHECK(dot.find("\"s0c0\" -> \"s1c0\" [penwidth=4.0000]") != std::string::npos);
  CHECK(dot.find("\"s0c0\" -> \"s1c1\" [penwidth=4.0000]") != std::string::npos);
}

TEST_CASE("min_overlap filters thin edges") {
  const auto fg = build_flow({Partition({0, 0, 0, 0, 1}), Partition({0, 0, 0, 1, 1})}, 2);
  REQUIRE(fg.edges.size() == 1);
  CHECK(fg.edges[0].overlap == 3);
}

TEST_CASE("without qualifying overlaps the DOT holds ranked nodes only") {
  // both segments cover the same nodes, so some members are always shared;
  // an overlap threshold above every intersection leaves no edges
  const auto fg = build_flow({Partition({0, 0, 1, 1}), Partition({0, 1, 0, 1})}, 2);
  CHECK(fg.edges.empty());
  CHECK(fg.nodes.size() == 4);
  const auto dot = emit_dot(fg);
  CHECK(dot.find("->") == std::string::npos);
  CHECK(dot.find("rank=same") != std::string::npos);
}

TEST_CASE("flow needs two segments over one node set") {
  CHECK_THROWS_AS(build_flow({Partition({0, 1})}), DataError);
  CHECK_THROWS_AS(build_flow({Partition({0, 1}), Partition({0, 1, 1})}), DataError);
}

TEST_CASE("emission is deterministic and JSON round-trips") {
  const auto fg = build_flow(split_merge_truth());
  CHECK(emit_dot(fg) == emit_dot(build_flow(split_merge_truth())));
  const auto text = emit_json(fg);
  CHECK(text == emit_json(fg));
  CHECK(parse_flow_json(text) == fg);
  CHECK(text.find("\"community\"") < text.find("\"segment\""));
}

TEST_CASE("split/merge truth: one split node, one merge node, sizes conserved") {
  const auto reps = split_merge_truth();
  const auto fg = build_flow(reps);
  std::size_t total_blocks = 0;
  for (const auto& p : reps) total_blocks += p.block_count();
  CHECK(fg.nodes.size() == total_blocks);
  std::size_t splits = 0, merges = 0;
  for (std::size_t i = 0; i < fg.nodes.size(); ++i) {
    std::size_t out = 0;
    for (const auto& e : fg.edges) {
      if (e.from == i) out += e.overlap;
    }
    CHECK(out <= fg.nodes[i].size);
    if (fg.nodes[i].segment + 1 < reps.size()) CHECK(out == fg.nodes[i].size);
    if (fg.out_degree(i) == 2) {
      ++splits;
      CHECK(fg.nodes[i].segment == 1);
    }
    if (fg.in_degree(i) == 2) {
      ++merges;
      CHECK(fg.nodes[i].segment == 6);
    }
  }
  CHECK(splits == 1);
  CHECK(merges == 1);
  for (std::size_t s = 0; s + 1 < reps.size(); ++s) {
    std::size_t between = 0;
    for (const auto& e : fg.edges) between += fg.nodes[e.from].segment == s;
    CHECK(between <= reps[s].block_count() * reps[s + 1].block_count());
  }
}

TEST_CASE("split/merge truth DOT matches the golden file") {
  const auto dot = emit_dot(build_flow(split_merge_truth()));
  CHECK(dot == read_file(std::string(GOLDEN_DIR) + "/split_merge_truth.dot"));
}
