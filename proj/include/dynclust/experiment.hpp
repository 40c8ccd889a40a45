#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynclust/clusterer.hpp"
#include "dynclust/generator.hpp"
#include "dynclust/metrics.hpp"

namespace dynclust {

enum class ExperimentMode { emerging, synthetic_dynamic, semi_synthetic, real };

std::string to_string(ExperimentMode m);
ExperimentMode experiment_mode_from_string(const std::string& s);

// Planted static model observed at growing edge budgets. Every repetition
// samples max_budget edges once; budget b sees the first b of them.
struct EmergingSpec {
  PlantedParams model;
  std::size_t budget_min = 1000;
  std::size_t budget_max = 1900;
  std::size_t budget_step = 100;

  std::vector<std::size_t> budgets() const;
};

struct DynamicSpec {
  SplitMergeParams model;
  std::size_t segments = 10;
  std::size_t edges_per_segment = 2000;
};

struct InjectionSpec {
  SplitMergeParams model;
  std::size_t edges_per_segment = 960;
  std::size_t cross_edges = 160;
};

struct ExperimentConfig {
  std::string name = "experiment";
  ExperimentMode mode = ExperimentMode::synthetic_dynamic;
  std::filesystem::path output_dir = "out";
  std::size_t repetitions = 10;
  std::size_t ensemble_size = 10;
  std::uint64_t master_seed = 1;
  std::size_t smoothing_radius = 1;  // 0 turns the smoothed method off
  std::size_t workers = 0;           // 0: available parallelism
  bool exclude_noise = false;        // drop noise nodes from the metric scope
  ClustererConfig clusterer;

  EmergingSpec emerging;
  DynamicSpec dynamic;
  InjectionSpec injection;

  // Real and semi-synthetic modes: edge list plus segmentation of the
  // stream, anchored at its first timestamp.
  std::filesystem::path dataset;
  double segment_width = 604800;  // one week of seconds
  std::size_t segment_count = 10;

  // K >= 2, R >= 1, mode-specific ranges, dataset present when needed.
  void validate() const;
};

// Unknown keys are rejected so typos surface. Relative dataset paths are
// resolved against `base_dir`.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
// Everything that affects results; `workers` is left out on purpose since
// outputs do not depend on it.
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

struct MethodResult {
  std::string name;  // baseline, ensemble, smoothed
  MetricSeries blocks;
  std::optional<MetricSeries> precision;  // absent without ground truth
  std::optional<MetricSeries> recall;
  std::vector<Partition> representatives;  // repetition 0, one per segment
};

struct ExperimentResult {
  std::filesystem::path directory;
  std::vector<std::string> segment_labels;  // segment index, or the edge budget in emerging mode
  std::vector<std::size_t> truth_blocks;    // empty without ground truth
  std::vector<bool> in_transition;
  std::vector<MethodResult> methods;

  const MethodResult& method(const std::string& name) const;
};

// Runs every repetition, writes
//   <output_dir>/<name>/manifest.json, clouds.json
//   <output_dir>/<name>/<method>/metrics.csv, partitions.json, flow.dot, flow.json
// (plus truth/ when ground truth exists) and returns the aggregated series.
// Output is assembled in a sibling temporary directory and renamed into
// place, so a failed run leaves nothing behind.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace dynclust
