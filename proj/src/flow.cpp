#include "dynclust/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include <json.hpp>

namespace dynclust {

using nlohmann::json;

namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string node_name(const FlowGraph::Node& n) {
  return "\"s" + std::to_string(n.segment) + "c" + std::to_string(n.community) + "\"";
}

}  // namespace

std::size_t FlowGraph::out_degree(std::size_t node) const {
  return std::count_if(edges.begin(), edges.end(), [&](const Edge& e) { return e.from == node; });
}

std::size_t FlowGraph::in_degree(std::size_t node) const {
  return std::count_if(edges.begin(), edges.end(), [&](const Edge& e) { return e.to == node; });
}

FlowGraph build_flow(const std::vector<Partition>& reps, std::size_t min_overlap) {
  if (reps.size() < 2) throw DataError("flow graph needs at least two segments");
  for (const auto& p : reps) {
    if (p.node_count() != reps.front().node_count()) throw DataError("segments cover different node sets");
  }
  FlowGraph fg;
  std::vector<std::size_t> first(reps.size());
  for (std::size_t s = 0; s < reps.size(); ++s) {
    first[s] = fg.nodes.size();
    const auto sizes = reps[s].block_sizes();
    for (BlockId b = 0; b < sizes.size(); ++b) fg.nodes.push_back({s, b, sizes[b]});
  }
  for (std::size_t s = 0; s + 1 < reps.size(); ++s) {
    std::map<std::pair<BlockId, BlockId>, std::size_t> overlap;
    for (NodeId i = 0; i < reps[s].node_count(); ++i) ++overlap[{reps[s][i], reps[s + 1][i]}];
    for (const auto& [pair, count] : overlap) {
      if (count >= std::max<std::size_t>(min_overlap, 1)) {
        fg.edges.push_back({first[s] + pair.first, first[s + 1] + pair.second, count});
      }
    }
  }
  return fg;
}

std::string emit_dot(const FlowGraph& fg, const FlowScale& scale) {
  std::string out = "digraph flow {\n  rankdir=LR;\n  node [shape=circle, fixedsize=true];\n";
  std::size_t i = 0;
  while (i < fg.nodes.size()) {
    const std::size_t seg = fg.nodes[i].segment;
    out += "  subgraph segment_" + std::to_string(seg) + " {\n    rank=same;\n";
    for (; i < fg.nodes.size() && fg.nodes[i].segment == seg; ++i) {
      const auto& n = fg.nodes[i];
      out += "    " + node_name(n) + " [label=\"" + std::to_string(n.size) + "\", width=" +
             fixed(scale.node_width * std::sqrt(static_cast<double>(n.size))) + "];\n";
    }
    out += "  }\n";
  }
  for (const auto& e : fg.edges) {
    const auto& a = fg.nodes[e.from];
    const auto& b = fg.nodes[e.to];
    const double w = scale.edge_width * static_cast<double>(e.overlap) / static_cast<double>(std::min(a.size, b.size));
    out += "  " + node_name(a) + " -> " + node_name(b) + " [penwidth=" + fixed(w) + "];\n";
  }
  out += "}\n";
  return out;
}

std::string emit_json(const FlowGraph& fg) {
  json nodes = json::array(), edges = json::array();
  for (const auto& n : fg.nodes) nodes.push_back({{"segment", n.segment}, {"community", n.community}, {"size", n.size}});
  for (const auto& e : fg.edges) edges.push_back({{"from", e.from}, {"to", e.to}, {"overlap", e.overlap}});
  return json{{"nodes", nodes}, {"edges", edges}}.dump(2) + "\n";
}

FlowGraph parse_flow_json(const std::string& text) {
  FlowGraph fg;
  try {
    const auto j = json::parse(text);
    for (const auto& n : j.at("nodes")) {
      fg.nodes.push_back({n.at("segment").get<std::size_t>(), n.at("community").get<BlockId>(),
                          n.at("size").get<std::size_t>()});
    }
    for (const auto& e : j.at("edges")) {
      fg.edges.push_back({e.at("from").get<std::size_t>(), e.at("to").get<std::size_t>(),
                          e.at("overlap").get<std::size_t>()});
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("flow json: ") + e.what());
  }
  for (const auto& e : fg.edges) {
    if (e.from >= fg.nodes.size() || e.to >= fg.nodes.size()) throw DataError("flow json: edge endpoint out of range");
  }
  return fg;
}

}  // namespace dynclust
