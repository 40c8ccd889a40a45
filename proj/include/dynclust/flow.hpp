#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dynclust/core.hpp"

namespace dynclust {

// Communities of consecutive segments linked by shared members. Community
// ids are per segment; continuity is carried by the edges only.
struct FlowGraph {
  struct Node {
    std::size_t segment = 0;
    BlockId community = 0;
    std::size_t size = 0;
    friend bool operator==(const Node&, const Node&) = default;
  };
  struct Edge {
    std::size_t from = 0;  // index into nodes, segment t
    std::size_t to = 0;    // index into nodes, segment t + 1
    std::size_t overlap = 0;
    friend bool operator==(const Edge&, const Edge&) = default;
  };

  std::vector<Node> nodes;  // ordered by (segment, community)
  std::vector<Edge> edges;  // ordered by (from, to)

  std::size_t out_degree(std::size_t node) const;
  std::size_t in_degree(std::size_t node) const;
  friend bool operator==(const FlowGraph&, const FlowGraph&) = default;
};

// One node per block of every partition and one edge per pair of blocks in
// adjacent segments sharing at least min_overlap members. Throws DataError
// with fewer than two segments or mismatched node universes.
FlowGraph build_flow(const std::vector<Partition>& reps, std::size_t min_overlap = 1);

struct FlowScale {
  double node_width = 0.1;  // inches per sqrt(member)
  double edge_width = 4.0;  // penwidth when every member of the smaller side flows
};

// Left-to-right DOT: one rank per segment, node width node_width*sqrt(size),
// edge penwidth edge_width*overlap/min(size_from, size_to). Numbers use a
// fixed format so the text is byte-stable.
std::string emit_dot(const FlowGraph& fg, const FlowScale& scale = {});

// {"edges": [{"from","overlap","to"}...], "nodes": [{"community","segment","size"}...]}
// with sorted keys.
std::string emit_json(const FlowGraph& fg);
FlowGraph parse_flow_json(const std::string& text);

}  // namespace dynclust
