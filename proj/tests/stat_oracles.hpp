#pragma once

#include <map>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "dynclust/generator.hpp"

namespace oracle {

// Degree-corrected model with `blocks` equal blocks over `nodes` nodes,
// internal rate 1, external rate 0.2 and theta spread over [0.5, 1.5].
inline dynclust::BlockModelSchedule chi_square_model(std::size_t nodes = 40, std::size_t blocks = 4) {
  std::vector<dynclust::BlockId> assignment(nodes);
  std::vector<double> theta(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    assignment[i] = static_cast<dynclust::BlockId>(i * blocks / nodes);
    theta[i] = 0.5 + static_cast<double>(i % 7) / 6.0;
  }
  dynclust::BlockModelSchedule m(assignment, theta);
  for (dynclust::BlockId r = 0; r < blocks; ++r) {
    for (dynclust::BlockId s = r; s < blocks; ++s) m.set_rate(r, s, dynclust::RateCurve(r == s ? 1.0 : 0.2));
  }
  return m;
}

struct ChiSquare {
  double statistic = 0;
  double dof = 0;
  double p_value = 0;
};

// Goodness of fit of sampled unordered pair counts against
// lambda_ij / sum lambda over all pairs i < j.
inline ChiSquare pair_frequency_test(const dynclust::BlockModelSchedule& m, std::size_t draws, std::uint64_t seed) {
  const auto edges = dynclust::sample_edges(m, 0, draws, seed);
  std::map<std::pair<dynclust::NodeId, dynclust::NodeId>, double> observed;
  for (auto [u, v] : edges) observed[{std::min(u, v), std::max(u, v)}] += 1;
  const double t = dynclust::segment_time(0);
  double total = 0;
  for (dynclust::NodeId i = 0; i < m.node_count(); ++i) {
    for (dynclust::NodeId j = i + 1; j < m.node_count(); ++j) total += m.lambda(i, j, t);
  }
  ChiSquare out;
  double cells = 0;
  for (dynclust::NodeId i = 0; i < m.node_count(); ++i) {
    for (dynclust::NodeId j = i + 1; j < m.node_count(); ++j) {
      const double expected = static_cast<double>(draws) * m.lambda(i, j, t) / total;
      if (expected <= 0) continue;
      const double o = observed.count({i, j}) ? observed[{i, j}] : 0.0;
      out.statistic += (o - expected) * (o - expected) / expected;
      cells += 1;
    }
  }
  out.dof = cells - 1;
  out.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(out.dof), out.statistic));
  return out;
}

}  // namespace oracle
