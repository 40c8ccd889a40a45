#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dynclust/core.hpp"

namespace dynclust {

// Agreement counts over the unordered node pairs in scope.
struct PairConfusion {
  std::uint64_t tp = 0;  // together in both
  std::uint64_t fp = 0;  // together in the prediction only
  std::uint64_t fn = 0;  // together in the truth only
  std::uint64_t tn = 0;  // apart in both

  std::uint64_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const PairConfusion&, const PairConfusion&) = default;
};

// Counted from the contingency table in O(n + cells). When `scope` is given
// only pairs of scope nodes count. Throws when fewer than two nodes are in
// scope.
PairConfusion pair_confusion(const Partition& predicted, const Partition& truth,
                             std::optional<std::span<const NodeId>> scope = std::nullopt);

// tp / (tp + fp); nullopt when nothing is predicted together.
std::optional<double> precision(const PairConfusion& c);
// tp / (tp + fn); nullopt when the truth has no co-clustered pair.
std::optional<double> recall(const PairConfusion& c);

struct SeriesPoint {
  std::optional<double> mean;  // nullopt when every run was undefined
  double stderr_of_mean = 0;   // sample stddev / sqrt(defined)
  std::size_t defined = 0;
  std::size_t undefined = 0;
};

struct MetricSeries {
  std::vector<SeriesPoint> per_segment;
  std::size_t runs = 0;
};

// runs[r][s] is the value of run r at segment s. Undefined values are left
// out of the mean and counted.
MetricSeries aggregate(const std::vector<std::vector<std::optional<double>>>& runs);

struct MetricRow {
  std::size_t segment = 0;
  std::string method;
  std::string metric;
  SeriesPoint value;
};

// Header plus one line per row: segment,method,metric,mean,stderr,defined,undefined.
// Undefined means are written as "undefined".
void write_metrics_csv(std::ostream& os, std::span<const MetricRow> rows);
std::vector<MetricRow> read_metrics_csv(std::istream& is);

}  // namespace dynclust
