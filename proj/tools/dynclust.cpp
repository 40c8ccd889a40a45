// Command-line front end: generate, cluster, resolve, evaluate, flow, run.
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 internal error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "dynclust/ensemble.hpp"
#include "dynclust/experiment.hpp"
#include "dynclust/flow.hpp"
#include "dynclust/io.hpp"
#include "dynclust/seeding.hpp"

namespace fs = std::filesystem;
using namespace dynclust;

namespace {

struct GenerateArgs {
  std::string config;
  std::string out;
  std::size_t repetition = 0;
  std::optional<std::uint64_t> seed;
};

// Writes edges.txt, schedule.json and truth/segment_<s>.txt for one
// repetition of a generated experiment.
void generate(const GenerateArgs& a) {
  auto cfg = load_config(a.config);
  if (a.seed) cfg.master_seed = *a.seed;
  const fs::path out(a.out);
  fs::create_directories(out / "truth");
  BlockModelSchedule model;
  DynamicGraph g;
  std::size_t segments = 0;
  NodeId offset = 0;
  switch (cfg.mode) {
    case ExperimentMode::emerging: {
      model = build_planted_model(cfg.emerging.model);
      const auto pairs = sample_edges(model, 0, cfg.emerging.budget_max,
                                      derive_seed(cfg.master_seed, {SeedStream::generation, a.repetition, 0, 0}));
      // the timestamp is the arrival order, so budget b is the first b lines
      std::vector<TimestampedEdge> edges;
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        edges.push_back({pairs[i].first, pairs[i].second, static_cast<Timestamp>(i)});
      }
      g = DynamicGraph(model.node_count(), std::move(edges));
      segments = 1;
      break;
    }
    case ExperimentMode::synthetic_dynamic:
      model = build_split_merge_model(cfg.dynamic.model);
      segments = cfg.dynamic.segments;
      g = sample_dynamic(model, {0, 1, segments}, cfg.dynamic.edges_per_segment, cfg.master_seed, a.repetition);
      break;
    case ExperimentMode::semi_synthetic: {
      auto real = ingest_snap(cfg.dataset);
      const TimeSegmentation seg{real.graph.min_time(), cfg.segment_width, cfg.segment_count};
      real.graph = restrict_to_span(real.graph, seg);
      model = build_split_merge_model(cfg.injection.model);
      segments = cfg.segment_count;
      offset = static_cast<NodeId>(real.graph.node_count());
      const double fraction = static_cast<double>(cfg.injection.cross_edges) /
                              static_cast<double>(cfg.injection.edges_per_segment);
      g = inject(real.graph, seg, model, cfg.injection.edges_per_segment, fraction, cfg.master_seed, a.repetition);
      write_node_map(out / "node_map.json", real);
      break;
    }
    case ExperimentMode::real:
      throw ConfigError("generate needs a synthetic or semi-synthetic config");
  }
  std::ofstream edges(out / "edges.txt");
  write_snap(edges, g);
  write_json_file(out / "schedule.json", schedule_to_json(model));
  for (std::size_t s = 0; s < segments; ++s) {
    // truth files list synthetic nodes under their ids in the output graph
    const auto truth = model.ground_truth(s);
    std::ofstream f(out / "truth" / ("segment_" + std::to_string(s) + ".txt"));
    for (NodeId i = 0; i < truth.node_count(); ++i) f << offset + i << ' ' << truth[i] << '\n';
  }
  std::cout << "wrote " << g.edge_count() << " edges over " << g.node_count() << " nodes to " << out.string() << "\n";
}

struct ClusterArgs {
  std::string edges;
  std::string out;
  double start = 0;
  std::optional<double> width;
  std::size_t count = 1;
  std::size_t ensemble = 10;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
  ClustererConfig clusterer;
};

void cluster_command(const ClusterArgs& a) {
  const auto data = ingest_snap(a.edges);
  TimeSegmentation seg{a.start, 0, a.count};
  // default: the count segments evenly cover the stream from `start`
  seg.width = a.width ? *a.width : (data.graph.max_time() - a.start) / static_cast<double>(a.count) + 1.0;
  seg.validate();
  const auto segments = slice(restrict_to_span(data.graph, seg), seg);
  const auto clouds = cluster_segments(segments, a.clusterer, a.ensemble, a.seed, 0, a.workers);
  write_json_file(a.out, clouds_to_json(clouds));
  std::cout << "clustered " << segments.size() << " segments x " << a.ensemble << " runs into " << a.out << "\n";
}

void resolve_command(const std::string& clouds_path, std::size_t radius, const std::string& out, std::size_t workers) {
  const auto clouds = clouds_from_json(read_json_file(clouds_path));
  const auto reps = resolve_segments(clouds, radius, workers);
  write_json_file(out, partitions_to_json(reps));
  std::cout << "resolved " << reps.size() << " segments into " << out << "\n";
}

void evaluate_command(const std::string& partitions_path, const std::string& truth_dir, const std::string& method,
                      const std::string& out) {
  const auto reps = partitions_from_json(read_json_file(partitions_path));
  std::vector<MetricRow> rows;
  for (std::size_t s = 0; s < reps.size(); ++s) {
    const fs::path path = fs::path(truth_dir) / ("segment_" + std::to_string(s) + ".txt");
    std::ifstream in(path);
    if (!in) throw DataError(path.string() + ": cannot open");
    // truth may list a subset of nodes; that subset is the metric scope
    std::vector<NodeId> scope;
    std::vector<BlockId> labels(reps[s].node_count());
    std::string line;
    std::size_t lineno = 0, next_label = 0;
    std::map<std::int64_t, BlockId> block_ids;
    std::vector<std::pair<NodeId, std::int64_t>> assigned;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      std::int64_t node = -1, block = -1;
      std::string rest;
      if (!(ls >> node >> block) || (ls >> rest) || node < 0 || block < 0) {
        throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected NODE BLOCK");
      }
      if (static_cast<std::size_t>(node) >= labels.size()) {
        throw DataError(path.string() + ":" + std::to_string(lineno) + ": node outside the partition");
      }
      assigned.emplace_back(static_cast<NodeId>(node), block);
      scope.push_back(static_cast<NodeId>(node));
    }
    // nodes outside the truth file get private labels beyond every block id
    for (const auto& [node, block] : assigned) {
      if (!block_ids.count(block)) block_ids[block] = static_cast<BlockId>(next_label++);
    }
    for (NodeId i = 0; i < labels.size(); ++i) labels[i] = static_cast<BlockId>(next_label + i);
    for (const auto& [node, block] : assigned) labels[node] = block_ids[block];
    const auto c = pair_confusion(reps[s], Partition(std::move(labels)), std::span<const NodeId>(scope));
    auto point = [](std::optional<double> v) {
      SeriesPoint p;
      p.mean = v;
      (v ? p.defined : p.undefined) = 1;
      return p;
    };
    rows.push_back({s, method, "blocks", point(static_cast<double>(reps[s].block_count()))});
    rows.push_back({s, method, "precision", point(precision(c))});
    rows.push_back({s, method, "recall", point(recall(c))});
  }
  std::ostringstream csv;
  write_metrics_csv(csv, rows);
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    write_text_file(out, csv.str());
  }
}

void flow_command(const std::string& partitions_path, std::size_t min_overlap, const std::string& dot,
                  const std::string& json_out) {
  const auto fg = build_flow(partitions_from_json(read_json_file(partitions_path)), min_overlap);
  if (!dot.empty()) write_text_file(dot, emit_dot(fg));
  if (!json_out.empty()) write_text_file(json_out, emit_json(fg));
  if (dot.empty() && json_out.empty()) std::cout << emit_dot(fg);
}

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> out;
  std::optional<std::size_t> repetitions;
};

void run_command(const RunArgs& a) {
  auto cfg = load_config(a.config);
  if (a.seed) cfg.master_seed = *a.seed;
  if (a.workers) cfg.workers = *a.workers;
  if (a.out) cfg.output_dir = *a.out;
  if (a.repetitions) cfg.repetitions = *a.repetitions;
  const auto result = run_experiment(cfg);
  std::cout << "wrote " << result.directory.string() << "\n";
  for (const auto& m : result.methods) {
    std::cout << m.name;
    if (m.precision) {
      double sum = 0;
      std::size_t n = 0;
      for (const auto& p : m.precision->per_segment) {
        if (p.mean) {
          sum += *p.mean;
          ++n;
        }
      }
      if (n) std::cout << "  mean precision " << sum / static_cast<double>(n);
    }
    std::cout << "\n";
  }
}

void add_clusterer_flags(CLI::App* cmd, ClustererConfig& c) {
  cmd->add_option("--sweeps", c.sweeps, "Max sweeps per block-count level");
  cmd->add_option("--beta", c.beta, "Inverse temperature");
  cmd->add_option("--b-min", c.b_min, "Smallest block count");
  cmd->add_option("--b-max", c.b_max, "Largest block count (0: automatic)");
  cmd->add_flag("--anneal", c.anneal, "Ramp beta up during each level");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic community detection with ensemble block-model clustering"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Sample a synthetic or semi-synthetic dataset from a config");
  g->add_option("-c,--config", gen.config, "Experiment config")->required()->check(CLI::ExistingFile);
  g->add_option("-o,--out", gen.out, "Output directory")->required();
  g->add_option("--repetition", gen.repetition, "Repetition index");
  g->add_option("--seed", gen.seed, "Master seed override");

  ClusterArgs cl;
  auto* c = app.add_subcommand("cluster", "Cluster every segment of an edge list K times");
  c->add_option("-e,--edges", cl.edges, "Edge list (SRC DST TIMESTAMP)")->required()->check(CLI::ExistingFile);
  c->add_option("-o,--out", cl.out, "Clouds JSON output")->required();
  c->add_option("--start", cl.start, "First segment start");
  c->add_option("--width", cl.width, "Segment width (default: cover the stream)");
  c->add_option("--count", cl.count, "Number of segments")->check(CLI::PositiveNumber);
  c->add_option("-k,--ensemble", cl.ensemble, "Runs per segment")->check(CLI::PositiveNumber);
  c->add_option("--seed", cl.seed, "Master seed");
  c->add_option("-w,--workers", cl.workers, "Worker threads (0: all cores)");
  add_clusterer_flags(c, cl.clusterer);

  std::string clouds_path, resolve_out;
  std::size_t radius = 0, resolve_workers = 0;
  auto* r = app.add_subcommand("resolve", "Resolve partition clouds into representatives");
  r->add_option("-i,--clouds", clouds_path, "Clouds JSON")->required()->check(CLI::ExistingFile);
  r->add_option("-o,--out", resolve_out, "Partitions JSON output")->required();
  r->add_option("--radius", radius, "Smoothing radius in segments (0: off)");
  r->add_option("-w,--workers", resolve_workers, "Worker threads (0: all cores)");

  std::string eval_parts, truth_dir, method = "ensemble", eval_out;
  auto* e = app.add_subcommand("evaluate", "Pairwise precision and recall against truth files");
  e->add_option("-p,--partitions", eval_parts, "Partitions JSON")->required()->check(CLI::ExistingFile);
  e->add_option("-t,--truth", truth_dir, "Directory of segment_<s>.txt truth files")
      ->required()
      ->check(CLI::ExistingDirectory);
  e->add_option("-m,--method", method, "Method name for the CSV");
  e->add_option("-o,--out", eval_out, "CSV output (default: stdout)");

  std::string flow_parts, dot_out, json_out;
  std::size_t min_overlap = 1;
  auto* f = app.add_subcommand("flow", "Community flow graph as DOT and JSON");
  f->add_option("-p,--partitions", flow_parts, "Partitions JSON")->required()->check(CLI::ExistingFile);
  f->add_option("--min-overlap", min_overlap, "Smallest overlap drawn as an edge")->check(CLI::PositiveNumber);
  f->add_option("--dot", dot_out, "DOT output");
  f->add_option("--json", json_out, "JSON output");

  RunArgs run;
  auto* x = app.add_subcommand("run", "Run a whole experiment from a config");
  x->add_option("-c,--config", run.config, "Experiment config")->required()->check(CLI::ExistingFile);
  x->add_option("--seed", run.seed, "Master seed override");
  x->add_option("-w,--workers", run.workers, "Worker threads override");
  x->add_option("-o,--out", run.out, "Output directory override");
  x->add_option("-r,--repetitions", run.repetitions, "Repetitions override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*g) generate(gen);
    if (*c) cluster_command(cl);
    if (*r) resolve_command(clouds_path, radius, resolve_out, resolve_workers);
    if (*e) evaluate_command(eval_parts, truth_dir, method, eval_out);
    if (*f) flow_command(flow_parts, min_overlap, dot_out, json_out);
    if (*x) run_command(run);
  } catch (const ConfigError& err) {
    std::cerr << "configuration error: " << err.what() << "\n";
    return 1;
  } catch (const DataError& err) {
    std::cerr << "data error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << "\n";
    return 3;
  }
  return 0;
}
