#include "dynclust/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace dynclust {

namespace {

std::uint64_t choose2(std::uint64_t n) { return n * (n - (n > 0 ? 1 : 0)) / 2; }

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

PairConfusion pair_confusion(const Partition& predicted, const Partition& truth,
                             std::optional<std::span<const NodeId>> scope) {
  if (predicted.node_count() != truth.node_count()) throw DataError("partitions cover different node sets");
  std::vector<NodeId> all;
  if (!scope) {
    all.resize(predicted.node_count());
    std::iota(all.begin(), all.end(), 0);
    scope = std::span<const NodeId>(all);
  }
  if (scope->size() < 2) throw DataError("pairwise metrics need at least two nodes in scope");

  std::unordered_map<std::uint64_t, std::uint64_t> cells;
  std::vector<std::uint64_t> pred_sizes(predicted.block_count(), 0), truth_sizes(truth.block_count(), 0);
  std::vector<bool> seen(predicted.node_count(), false);
  for (NodeId v : *scope) {
    if (v >= predicted.node_count()) throw DataError("scope node out of range");
    if (seen[v]) throw DataError("scope lists a node twice");
    seen[v] = true;
    ++cells[(static_cast<std::uint64_t>(predicted[v]) << 32) | truth[v]];
    ++pred_sizes[predicted[v]];
    ++truth_sizes[truth[v]];
  }
  PairConfusion c;
  for (const auto& [key, count] : cells) c.tp += choose2(count);
  std::uint64_t pred_pairs = 0, truth_pairs = 0;
  for (auto s : pred_sizes) pred_pairs += choose2(s);
  for (auto s : truth_sizes) truth_pairs += choose2(s);
  c.fp = pred_pairs - c.tp;
  c.fn = truth_pairs - c.tp;
  c.tn = choose2(scope->size()) - c.tp - c.fp - c.fn;
  return c;
}

std::optional<double> precision(const PairConfusion& c) {
  if (c.tp + c.fp == 0) return std::nullopt;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

std::optional<double> recall(const PairConfusion& c) {
  if (c.tp + c.fn == 0) return std::nullopt;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

MetricSeries aggregate(const std::vector<std::vector<std::optional<double>>>& runs) {
  if (runs.empty()) throw DataError("aggregate needs at least one run");
  const std::size_t segments = runs.front().size();
  for (const auto& r : runs) {
    if (r.size() != segments) throw DataError("runs have different segment counts");
  }
  MetricSeries out;
  out.runs = runs.size();
  out.per_segment.resize(segments);
  for (std::size_t s = 0; s < segments; ++s) {
    auto& pt = out.per_segment[s];
    double sum = 0.0;
    for (const auto& r : runs) {
      if (r[s]) {
        sum += *r[s];
        ++pt.defined;
      } else {
        ++pt.undefined;
      }
    }
    if (pt.defined == 0) continue;
    const double mean = sum / static_cast<double>(pt.defined);
    pt.mean = mean;
    if (pt.defined > 1) {
      double ss = 0.0;
      for (const auto& r : runs) {
        if (r[s]) ss += (*r[s] - mean) * (*r[s] - mean);
      }
      const double sd = std::sqrt(ss / static_cast<double>(pt.defined - 1));
      pt.stderr_of_mean = sd / std::sqrt(static_cast<double>(pt.defined));
    }
  }
  return out;
}

void write_metrics_csv(std::ostream& os, std::span<const MetricRow> rows) {
  os << "segment,method,metric,mean,stderr,defined,undefined\n";
  for (const auto& r : rows) {
    os << r.segment << ',' << r.method << ',' << r.metric << ','
       << (r.value.mean ? format_real(*r.value.mean) : std::string("undefined")) << ','
       << format_real(r.value.stderr_of_mean) << ',' << r.value.defined << ',' << r.value.undefined << '\n';
  }
}

std::vector<MetricRow> read_metrics_csv(std::istream& is) {
  std::vector<MetricRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (lineno == 1 || line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw DataError("metrics csv line " + std::to_string(lineno) + ": expected 7 fields");
    try {
      MetricRow r;
      r.segment = std::stoul(cells[0]);
      r.method = cells[1];
      r.metric = cells[2];
      if (cells[3] != "undefined") r.value.mean = std::stod(cells[3]);
      r.value.stderr_of_mean = std::stod(cells[4]);
      r.value.defined = std::stoul(cells[5]);
      r.value.undefined = std::stoul(cells[6]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw DataError("metrics csv line " + std::to_string(lineno) + ": malformed number");
    }
  }
  return rows;
}

}  // namespace dynclust
