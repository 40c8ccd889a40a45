#include "dynclust/experiment.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "dynclust/ensemble.hpp"
#include "dynclust/flow.hpp"
#include "dynclust/io.hpp"
#include "dynclust/seeding.hpp"

namespace dynclust {

using nlohmann::json;
namespace fs = std::filesystem;

std::string to_string(ExperimentMode m) {
  switch (m) {
    case ExperimentMode::emerging: return "emerging";
    case ExperimentMode::synthetic_dynamic: return "synthetic-dynamic";
    case ExperimentMode::semi_synthetic: return "semi-synthetic";
    case ExperimentMode::real: return "real";
  }
  return "unknown";
}

ExperimentMode experiment_mode_from_string(const std::string& s) {
  for (auto m : {ExperimentMode::emerging, ExperimentMode::synthetic_dynamic, ExperimentMode::semi_synthetic,
                 ExperimentMode::real}) {
    if (to_string(m) == s) return m;
  }
  throw ConfigError("unknown mode \"" + s + "\"");
}

std::vector<std::size_t> EmergingSpec::budgets() const {
  std::vector<std::size_t> out;
  for (std::size_t b = budget_min; b <= budget_max; b += budget_step) out.push_back(b);
  return out;
}

namespace {

// Reads fields of one JSON object and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where_ + "." + key + ": wrong type");
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(where_ + ": unknown key \"" + key + "\"");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void read_clusterer(const json& j, ClustererConfig& c) {
  ObjectReader r(j, "clusterer");
  r.read("sweeps", c.sweeps);
  r.read("beta", c.beta);
  r.read("b_min", c.b_min);
  r.read("b_max", c.b_max);
  r.read("anneal", c.anneal);
  r.read("epsilon", c.epsilon);
  r.read("merge_proposals", c.merge_proposals);
  r.read("reduction_rate", c.reduction_rate);
  r.read("convergence_tol", c.convergence_tol);
  r.read("max_initial_blocks", c.max_initial_blocks);
  r.read("allow_vacate", c.allow_vacate);
  r.finish();
}

json clusterer_json(const ClustererConfig& c) {
  return {{"sweeps", c.sweeps},
          {"beta", c.beta},
          {"b_min", c.b_min},
          {"b_max", c.b_max},
          {"anneal", c.anneal},
          {"epsilon", c.epsilon},
          {"merge_proposals", c.merge_proposals},
          {"reduction_rate", c.reduction_rate},
          {"convergence_tol", c.convergence_tol},
          {"max_initial_blocks", c.max_initial_blocks},
          {"allow_vacate", c.allow_vacate}};
}

void read_split_merge(ObjectReader& r, SplitMergeParams& p) {
  r.read("split_size", p.split_size);
  r.read("merge_block_size", p.merge_block_size);
  r.read("constant_blocks", p.constant_blocks);
  r.read("constant_block_size", p.constant_block_size);
  r.read("noise_nodes", p.noise_nodes);
  r.read("split_window", p.split_window);
  r.read("merge_window", p.merge_window);
  r.read("external_internal_ratio", p.external_internal_ratio);
  r.read("noise_degree_ratio", p.noise_degree_ratio);
}

json split_merge_json(const SplitMergeParams& p) {
  return {{"split_size", p.split_size},
          {"merge_block_size", p.merge_block_size},
          {"constant_blocks", p.constant_blocks},
          {"constant_block_size", p.constant_block_size},
          {"noise_nodes", p.noise_nodes},
          {"split_window", p.split_window},
          {"merge_window", p.merge_window},
          {"external_internal_ratio", p.external_internal_ratio},
          {"noise_degree_ratio", p.noise_degree_ratio}};
}

bool uses_dataset(ExperimentMode m) { return m == ExperimentMode::semi_synthetic || m == ExperimentMode::real; }

}  // namespace

void ExperimentConfig::validate() const {
  if (name.empty() || name.find('/') != std::string::npos || name == "." || name == "..") {
    throw ConfigError("name must be a plain directory name");
  }
  if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (ensemble_size < 2) throw ConfigError("ensemble_size must be at least 2");
  switch (mode) {
    case ExperimentMode::emerging:
      if (emerging.budget_step == 0 || emerging.budget_min == 0 || emerging.budget_min > emerging.budget_max) {
        throw ConfigError("emerging budgets need 0 < budget_min <= budget_max and budget_step > 0");
      }
      if (emerging.model.blocks == 0 || emerging.model.nodes < emerging.model.blocks) {
        throw ConfigError("emerging model needs 1 <= blocks <= nodes");
      }
      clusterer.validate(emerging.model.nodes);
      break;
    case ExperimentMode::synthetic_dynamic:
      if (dynamic.segments < 1 || dynamic.edges_per_segment < 1) {
        throw ConfigError("synthetic-dynamic needs segments >= 1 and edges_per_segment >= 1");
      }
      break;
    case ExperimentMode::semi_synthetic:
      if (injection.edges_per_segment < 1 || injection.cross_edges > injection.edges_per_segment) {
        throw ConfigError("injection needs edges_per_segment >= 1 and cross_edges <= edges_per_segment");
      }
      [[fallthrough]];
    case ExperimentMode::real:
      if (dataset.empty()) throw ConfigError("mode " + to_string(mode) + " needs a dataset");
      if (!fs::exists(dataset)) throw ConfigError("dataset not found: " + dataset.string());
      if (!(segment_width > 0) || segment_count < 1) throw ConfigError("segmentation needs width > 0 and count >= 1");
      break;
  }
}

ExperimentConfig config_from_json(const json& j, const fs::path& base_dir) {
  ExperimentConfig c;
  ObjectReader r(j, "config");
  std::string mode = to_string(c.mode), output = c.output_dir.string(), dataset;
  r.read("name", c.name);
  r.read("mode", mode);
  c.mode = experiment_mode_from_string(mode);
  r.read("output_dir", output);
  c.output_dir = output;
  r.read("repetitions", c.repetitions);
  r.read("ensemble_size", c.ensemble_size);
  r.read("master_seed", c.master_seed);
  r.read("smoothing_radius", c.smoothing_radius);
  r.read("workers", c.workers);
  r.read("exclude_noise", c.exclude_noise);
  if (const json* cl = r.child("clusterer")) read_clusterer(*cl, c.clusterer);
  if (const json* g = r.child("generator")) {
    ObjectReader gr(*g, "generator");
    switch (c.mode) {
      case ExperimentMode::emerging:
        gr.read("nodes", c.emerging.model.nodes);
        gr.read("blocks", c.emerging.model.blocks);
        gr.read("external_internal_ratio", c.emerging.model.external_internal_ratio);
        gr.read("budget_min", c.emerging.budget_min);
        gr.read("budget_max", c.emerging.budget_max);
        gr.read("budget_step", c.emerging.budget_step);
        break;
      case ExperimentMode::synthetic_dynamic:
        read_split_merge(gr, c.dynamic.model);
        gr.read("segments", c.dynamic.segments);
        gr.read("edges_per_segment", c.dynamic.edges_per_segment);
        break;
      case ExperimentMode::semi_synthetic:
        read_split_merge(gr, c.injection.model);
        gr.read("edges_per_segment", c.injection.edges_per_segment);
        gr.read("cross_edges", c.injection.cross_edges);
        break;
      case ExperimentMode::real:
        break;
    }
    gr.finish();
  }
  r.read("dataset", dataset);
  if (!dataset.empty()) c.dataset = fs::path(dataset).is_absolute() ? fs::path(dataset) : base_dir / dataset;
  if (const json* s = r.child("segmentation")) {
    ObjectReader sr(*s, "segmentation");
    sr.read("width", c.segment_width);
    sr.read("count", c.segment_count);
    sr.finish();
  }
  r.finish();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j = {{"name", c.name},
            {"mode", to_string(c.mode)},
            {"output_dir", c.output_dir.generic_string()},
            {"repetitions", c.repetitions},
            {"ensemble_size", c.ensemble_size},
            {"master_seed", c.master_seed},
            {"smoothing_radius", c.smoothing_radius},
            {"exclude_noise", c.exclude_noise},
            {"clusterer", clusterer_json(c.clusterer)}};
  switch (c.mode) {
    case ExperimentMode::emerging:
      j["generator"] = {{"nodes", c.emerging.model.nodes},
                        {"blocks", c.emerging.model.blocks},
                        {"external_internal_ratio", c.emerging.model.external_internal_ratio},
                        {"budget_min", c.emerging.budget_min},
                        {"budget_max", c.emerging.budget_max},
                        {"budget_step", c.emerging.budget_step}};
      break;
    case ExperimentMode::synthetic_dynamic:
      j["generator"] = split_merge_json(c.dynamic.model);
      j["generator"]["segments"] = c.dynamic.segments;
      j["generator"]["edges_per_segment"] = c.dynamic.edges_per_segment;
      break;
    case ExperimentMode::semi_synthetic:
      j["generator"] = split_merge_json(c.injection.model);
      j["generator"]["edges_per_segment"] = c.injection.edges_per_segment;
      j["generator"]["cross_edges"] = c.injection.cross_edges;
      break;
    case ExperimentMode::real:
      break;
  }
  if (uses_dataset(c.mode)) {
    j["dataset"] = c.dataset.filename().generic_string();
    j["segmentation"] = {{"width", c.segment_width}, {"count", c.segment_count}};
  }
  return j;
}

ExperimentConfig load_config(const fs::path& path) {
  json j;
  try {
    j = read_json_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  auto cfg = config_from_json(j, path.parent_path());
  cfg.validate();
  return cfg;
}

const MethodResult& ExperimentResult::method(const std::string& name) const {
  for (const auto& m : methods) {
    if (m.name == name) return m;
  }
  throw ConfigError("no method named " + name);
}

namespace {

// Inputs shared by every repetition.
struct Setup {
  std::size_t node_count = 0;
  std::vector<std::string> labels;
  std::vector<std::size_t> csv_segment;  // value of the CSV segment column
  std::vector<Partition> truth;          // per segment; empty without ground truth
  std::vector<bool> transition;
  std::vector<NodeId> scope;             // metric scope
  std::optional<BlockModelSchedule> model;
  std::optional<SnapData> real;
  TimeSegmentation seg;
};

std::vector<NodeId> model_scope(const BlockModelSchedule& model, NodeId offset, bool exclude_noise) {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < model.node_count(); ++i) {
    if (exclude_noise && model.noise_block() && model.assignment()[i] == *model.noise_block()) continue;
    out.push_back(offset + i);
  }
  return out;
}

Setup prepare(const ExperimentConfig& cfg) {
  Setup s;
  switch (cfg.mode) {
    case ExperimentMode::emerging: {
      s.model = build_planted_model(cfg.emerging.model);
      s.node_count = s.model->node_count();
      for (auto b : cfg.emerging.budgets()) {
        s.labels.push_back(std::to_string(b));
        s.csv_segment.push_back(b);
        s.truth.push_back(s.model->ground_truth(0));
        s.transition.push_back(false);
      }
      s.scope = model_scope(*s.model, 0, cfg.exclude_noise);
      break;
    }
    case ExperimentMode::synthetic_dynamic: {
      s.model = build_split_merge_model(cfg.dynamic.model);
      s.node_count = s.model->node_count();
      s.seg = {0, 1, cfg.dynamic.segments};
      for (std::size_t t = 0; t < cfg.dynamic.segments; ++t) {
        s.labels.push_back(std::to_string(t));
        s.csv_segment.push_back(t);
        s.truth.push_back(s.model->ground_truth(t));
        s.transition.push_back(s.model->in_transition(t));
      }
      s.scope = model_scope(*s.model, 0, cfg.exclude_noise);
      break;
    }
    case ExperimentMode::semi_synthetic:
    case ExperimentMode::real: {
      s.real = ingest_snap(cfg.dataset);
      s.seg = {s.real->graph.min_time(), cfg.segment_width, cfg.segment_count};
      s.real->graph = restrict_to_span(s.real->graph, s.seg);
      if (s.real->graph.empty()) throw DataError(cfg.dataset.string() + ": no edges inside the segmentation span");
      s.node_count = s.real->graph.node_count();
      for (std::size_t t = 0; t < cfg.segment_count; ++t) {
        s.labels.push_back(std::to_string(t));
        s.csv_segment.push_back(t);
        s.transition.push_back(false);
      }
      if (cfg.mode == ExperimentMode::real) break;
      s.model = build_split_merge_model(cfg.injection.model);
      const auto n_real = static_cast<NodeId>(s.node_count);
      s.node_count += s.model->node_count();
      for (std::size_t t = 0; t < cfg.segment_count; ++t) {
        // real nodes stay singletons; only synthetic nodes are in scope
        std::vector<BlockId> labels(s.node_count);
        const auto synthetic = s.model->ground_truth(t);
        for (NodeId i = 0; i < n_real; ++i) labels[i] = i;
        for (NodeId i = 0; i < s.model->node_count(); ++i) labels[n_real + i] = n_real + synthetic[i];
        s.truth.emplace_back(std::move(labels));
        s.transition[t] = s.model->in_transition(t);
      }
      s.scope = model_scope(*s.model, n_real, cfg.exclude_noise);
      break;
    }
  }
  return s;
}

std::vector<SegmentGraph> segments_for(const ExperimentConfig& cfg, const Setup& s, std::size_t rep) {
  switch (cfg.mode) {
    case ExperimentMode::emerging: {
      const auto budgets = cfg.emerging.budgets();
      const auto edges = sample_edges(*s.model, 0, budgets.back(),
                                      derive_seed(cfg.master_seed, {SeedStream::generation, rep, 0, 0}));
      std::vector<SegmentGraph> out;
      for (std::size_t i = 0; i < budgets.size(); ++i) {
        out.emplace_back(i, s.node_count, std::span(edges.data(), budgets[i]));
      }
      return out;
    }
    case ExperimentMode::synthetic_dynamic:
      return slice(sample_dynamic(*s.model, s.seg, cfg.dynamic.edges_per_segment, cfg.master_seed, rep), s.seg);
    case ExperimentMode::semi_synthetic: {
      const double fraction = static_cast<double>(cfg.injection.cross_edges) /
                              static_cast<double>(cfg.injection.edges_per_segment);
      return slice(inject(s.real->graph, s.seg, *s.model, cfg.injection.edges_per_segment, fraction, cfg.master_seed,
                          rep),
                   s.seg);
    }
    case ExperimentMode::real:
      return slice(s.real->graph, s.seg);
  }
  return {};
}

// values[rep][segment]
using Table = std::vector<std::vector<std::optional<double>>>;

struct MethodTables {
  std::string name;
  Table blocks, precision, recall;
  std::vector<Partition> representatives;
};

void score(MethodTables& m, std::size_t rep, const std::vector<Partition>& reps, const Setup& s) {
  for (std::size_t t = 0; t < reps.size(); ++t) {
    m.blocks[rep][t] = static_cast<double>(reps[t].block_count());
    if (s.truth.empty()) continue;
    const auto c = pair_confusion(reps[t], s.truth[t], std::span<const NodeId>(s.scope));
    m.precision[rep][t] = precision(c);
    m.recall[rep][t] = recall(c);
  }
}

std::vector<MetricRow> rows_for(const MethodResult& m, const Setup& s) {
  std::vector<MetricRow> rows;
  for (std::size_t t = 0; t < s.labels.size(); ++t) {
    rows.push_back({s.csv_segment[t], m.name, "blocks", m.blocks.per_segment[t]});
    if (m.precision) rows.push_back({s.csv_segment[t], m.name, "precision", m.precision->per_segment[t]});
    if (m.recall) rows.push_back({s.csv_segment[t], m.name, "recall", m.recall->per_segment[t]});
  }
  return rows;
}

void write_method(const fs::path& dir, const MethodResult& m, const Setup& s) {
  fs::create_directories(dir);
  std::ostringstream csv;
  const auto rows = rows_for(m, s);
  write_metrics_csv(csv, rows);
  write_text_file(dir / "metrics.csv", csv.str());
  write_json_file(dir / "partitions.json", partitions_to_json(m.representatives));
  if (m.representatives.size() >= 2) {
    const auto fg = build_flow(m.representatives);
    write_text_file(dir / "flow.dot", emit_dot(fg));
    write_text_file(dir / "flow.json", emit_json(fg));
  }
}

json manifest(const ExperimentConfig& cfg, const Setup& s, const std::vector<std::string>& methods) {
  json generation = json::array(), clustering = json::array();
  for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
    json gen = json::array(), clu = json::array();
    for (std::size_t t = 0; t < s.labels.size(); ++t) {
      gen.push_back(derive_seed(cfg.master_seed, {SeedStream::generation, rep, t, 0}));
      clu.push_back(ensemble_seeds(cfg.master_seed, rep, t, cfg.ensemble_size));
    }
    generation.push_back(gen);
    clustering.push_back(clu);
  }
  json j = {{"config", config_to_json(cfg)},
            {"methods", methods},
            {"baseline", "ensemble member 0 of each segment's cloud"},
            {"segments", s.labels},
            {"node_count", s.node_count},
            {"metric_scope_size", s.scope.size()},
            {"in_transition", s.transition},
            {"seeds",
             {{"master", cfg.master_seed},
              {"derivation",
               "splitmix64(master + index * 0x9E3779B97F4A7C15), index = stream << 60 | repetition << 44 | "
               "segment << 24 | member; streams: generation 1, clustering 2, injection 3"},
              {"generation", generation},
              {"clustering", clustering}}}};
  if (s.real) j["real_node_count"] = s.real->graph.node_count();
  return j;
}

MethodResult finish(MethodTables& t, bool has_truth) {
  MethodResult m;
  m.name = t.name;
  m.blocks = aggregate(t.blocks);
  if (has_truth) {
    m.precision = aggregate(t.precision);
    m.recall = aggregate(t.recall);
  }
  m.representatives = std::move(t.representatives);
  return m;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Setup s = prepare(cfg);
  const std::size_t S = s.labels.size();
  const bool has_truth = !s.truth.empty();
  const bool smoothed = cfg.smoothing_radius > 0 && S > 1 && cfg.mode != ExperimentMode::emerging;

  std::vector<MethodTables> tables;
  for (const char* name : {"baseline", "ensemble", "smoothed"}) {
    if (std::string(name) == "smoothed" && !smoothed) continue;
    MethodTables t;
    t.name = name;
    t.blocks = t.precision = t.recall = Table(cfg.repetitions, std::vector<std::optional<double>>(S));
    tables.push_back(std::move(t));
  }

  std::vector<PartitionCloud> first_clouds;
  for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
    const auto segments = segments_for(cfg, s, rep);
    auto clouds = cluster_segments(segments, cfg.clusterer, cfg.ensemble_size, cfg.master_seed, rep, cfg.workers);
    std::vector<std::vector<Partition>> per_method;
    std::vector<Partition> baseline;
    for (const auto& c : clouds) baseline.push_back(c.partitions.front());
    per_method.push_back(std::move(baseline));
    per_method.push_back(resolve_segments(clouds, 0, cfg.workers));
    if (smoothed) per_method.push_back(resolve_segments(clouds, cfg.smoothing_radius, cfg.workers));
    for (std::size_t m = 0; m < tables.size(); ++m) {
      score(tables[m], rep, per_method[m], s);
      if (rep == 0) tables[m].representatives = std::move(per_method[m]);
    }
    if (rep == 0) first_clouds = std::move(clouds);
  }

  ExperimentResult result;
  result.segment_labels = s.labels;
  result.in_transition = s.transition;
  std::vector<std::string> names;
  for (auto& t : tables) {
    names.push_back(t.name);
    result.methods.push_back(finish(t, has_truth));
  }
  if (has_truth) {
    for (std::size_t t = 0; t < S; ++t) {
      // count only blocks that meet the metric scope
      std::set<BlockId> blocks;
      for (NodeId v : s.scope) blocks.insert(s.truth[t][v]);
      result.truth_blocks.push_back(blocks.size());
    }
  }

  const fs::path final_dir = cfg.output_dir / cfg.name;
  const fs::path tmp_dir = cfg.output_dir / (cfg.name + ".partial");
  fs::remove_all(tmp_dir);
  try {
    fs::create_directories(tmp_dir);
    json m = manifest(cfg, s, names);
    if (has_truth) m["truth_blocks"] = result.truth_blocks;
    write_json_file(tmp_dir / "manifest.json", m);
    write_json_file(tmp_dir / "clouds.json", clouds_to_json(first_clouds));
    if (s.real) write_node_map(tmp_dir / "node_map.json", *s.real);
    for (const auto& method : result.methods) write_method(tmp_dir / method.name, method, s);
    if (has_truth && cfg.mode != ExperimentMode::semi_synthetic) {
      MethodResult truth;
      truth.name = "truth";
      Table blocks(1, std::vector<std::optional<double>>(S));
      for (std::size_t t = 0; t < S; ++t) blocks[0][t] = static_cast<double>(result.truth_blocks[t]);
      truth.blocks = aggregate(blocks);
      truth.representatives = s.truth;
      write_method(tmp_dir / "truth", truth, s);
    }
    if (s.model) write_json_file(tmp_dir / "schedule.json", schedule_to_json(*s.model));
    fs::remove_all(final_dir);
    fs::rename(tmp_dir, final_dir);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(tmp_dir, ec);
    throw;
  }
  result.directory = final_dir;
  return result;
}

}  // namespace dynclust
