#include "dynclust/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace dynclust {

using nlohmann::json;

namespace {

std::string where(const std::string& source, std::size_t line) { return source + ":" + std::to_string(line) + ": "; }

// Splits on whitespace; returns false on any non-integer token.
bool parse_integers(const std::string& line, std::vector<std::int64_t>& out) {
  out.clear();
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i == line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(line.data() + i, line.data() + j, v);
    if (ec != std::errc() || ptr != line.data() + j) return false;
    out.push_back(v);
    i = j;
  }
  return true;
}

bool is_skippable(const std::string& line) {
  auto first = std::find_if(line.begin(), line.end(), [](unsigned char c) { return !std::isspace(c); });
  return first == line.end() || *first == '#';
}

template <typename T>
T get_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw DataError(std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DataError(std::string("field \"") + key + "\": " + e.what());
  }
}

json curve_to_json(const RateCurve& c) {
  json keys = json::array();
  for (const auto& k : c.keyframes()) keys.push_back({k.time, k.value});
  return keys;
}

RateCurve curve_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw DataError("rate curve needs at least one keyframe");
  std::vector<Keyframe> keys;
  for (const auto& k : j) {
    if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number()) {
      throw DataError("keyframe must be a [time, value] pair");
    }
    keys.push_back({k[0].get<double>(), k[1].get<double>()});
  }
  return RateCurve(std::move(keys));
}

Partition labels_from_json(const json& j) {
  try {
    return Partition(j.get<std::vector<BlockId>>());
  } catch (const json::exception& e) {
    throw DataError(std::string("label vector: ") + e.what());
  }
}

}  // namespace

SnapData read_snap(std::istream& is, const std::string& source) {
  struct Raw {
    std::int64_t src, dst, t;
  };
  std::vector<Raw> raw;
  std::string line;
  std::vector<std::int64_t> fields;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (is_skippable(line)) continue;
    if (!parse_integers(line, fields)) throw DataError(where(source, lineno) + "non-integer field");
    if (fields.size() != 3) throw DataError(where(source, lineno) + "expected SRC DST TIMESTAMP");
    if (fields[0] < 0 || fields[1] < 0 || fields[2] < 0) throw DataError(where(source, lineno) + "negative field");
    raw.push_back({fields[0], fields[1], fields[2]});
  }
  if (is.bad()) throw DataError(source + ": read failed");
  if (raw.empty()) throw DataError(source + ": no edges");

  SnapData out;
  for (const auto& r : raw) {
    out.original_ids.push_back(r.src);
    out.original_ids.push_back(r.dst);
  }
  std::sort(out.original_ids.begin(), out.original_ids.end());
  out.original_ids.erase(std::unique(out.original_ids.begin(), out.original_ids.end()), out.original_ids.end());
  std::unordered_map<std::int64_t, NodeId> dense;
  for (std::size_t i = 0; i < out.original_ids.size(); ++i) dense[out.original_ids[i]] = static_cast<NodeId>(i);

  std::vector<TimestampedEdge> edges;
  edges.reserve(raw.size());
  for (const auto& r : raw) edges.push_back({dense[r.src], dense[r.dst], static_cast<Timestamp>(r.t)});
  out.graph = DynamicGraph(out.original_ids.size(), std::move(edges));
  return out;
}

SnapData ingest_snap(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open");
  return read_snap(in, path.string());
}

void write_snap(std::ostream& os, const DynamicGraph& g) {
  for (const auto& e : g.edges()) {
    if (e.t != std::floor(e.t)) throw ConfigError("edge list format needs integral timestamps");
    os << e.src << ' ' << e.dst << ' ' << static_cast<std::int64_t>(e.t) << '\n';
  }
}

json node_map_json(const SnapData& data) { return json{{"original_ids", data.original_ids}}; }

void write_node_map(const std::filesystem::path& path, const SnapData& data) {
  write_json_file(path, node_map_json(data));
}

void write_ground_truth(std::ostream& os, const Partition& p) {
  for (NodeId i = 0; i < p.node_count(); ++i) os << i << ' ' << p[i] << '\n';
}

Partition read_ground_truth(std::istream& is, const std::string& source) {
  std::vector<std::int64_t> labels;
  std::vector<bool> seen;
  std::string line;
  std::vector<std::int64_t> fields;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (is_skippable(line)) continue;
    if (!parse_integers(line, fields) || fields.size() != 2 || fields[0] < 0 || fields[1] < 0) {
      throw DataError(where(source, lineno) + "expected NODE BLOCK");
    }
    const auto node = static_cast<std::size_t>(fields[0]);
    if (node >= labels.size()) {
      labels.resize(node + 1, -1);
      seen.resize(node + 1, false);
    }
    if (seen[node]) throw DataError(where(source, lineno) + "node listed twice");
    seen[node] = true;
    labels[node] = fields[1];
  }
  if (labels.empty()) throw DataError(source + ": no assignments");
  std::vector<BlockId> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!seen[i]) throw DataError(source + ": node " + std::to_string(i) + " has no block");
    out[i] = static_cast<BlockId>(labels[i]);
  }
  return Partition(std::move(out));
}

json schedule_to_json(const BlockModelSchedule& model) {
  json rates = json::array();
  for (BlockId r = 0; r < model.block_count(); ++r) {
    for (BlockId s = r; s < model.block_count(); ++s) {
      rates.push_back({{"blocks", {r, s}}, {"keyframes", curve_to_json(model.rate_curve(r, s))}});
    }
  }
  json events = json::array();
  for (const auto& e : model.events()) {
    events.push_back({{"kind", to_string(e.kind)}, {"blocks", e.blocks}, {"t_start", e.t_start}, {"t_end", e.t_end}});
  }
  json j = {{"assignment", model.assignment()}, {"theta", model.theta()}, {"rates", rates}, {"events", events}};
  j["noise_block"] = model.noise_block() ? json(*model.noise_block()) : json(nullptr);
  return j;
}

BlockModelSchedule schedule_from_json(const json& j) {
  BlockModelSchedule model(get_field<std::vector<BlockId>>(j, "assignment"), get_field<std::vector<double>>(j, "theta"));
  for (const auto& entry : get_field<json>(j, "rates")) {
    const auto blocks = get_field<std::vector<BlockId>>(entry, "blocks");
    if (blocks.size() != 2) throw DataError("rate entry needs two blocks");
    model.set_rate(blocks[0], blocks[1], curve_from_json(get_field<json>(entry, "keyframes")));
  }
  for (const auto& entry : get_field<json>(j, "events")) {
    EventSpec e;
    e.kind = event_kind_from_string(get_field<std::string>(entry, "kind"));
    e.blocks = get_field<std::vector<BlockId>>(entry, "blocks");
    e.t_start = get_field<double>(entry, "t_start");
    e.t_end = get_field<double>(entry, "t_end");
    model.record_event(e);
  }
  if (j.contains("noise_block") && !j["noise_block"].is_null()) {
    model.set_noise_block(get_field<BlockId>(j, "noise_block"));
  }
  return model;
}

json partitions_to_json(const std::vector<Partition>& reps) {
  json segments = json::array();
  for (std::size_t s = 0; s < reps.size(); ++s) segments.push_back({{"segment", s}, {"labels", reps[s].labels()}});
  return json{{"segments", segments}};
}

std::vector<Partition> partitions_from_json(const json& j) {
  std::vector<Partition> out;
  for (const auto& seg : get_field<json>(j, "segments")) {
    if (get_field<std::size_t>(seg, "segment") != out.size()) throw DataError("segments must be listed in order");
    out.push_back(labels_from_json(get_field<json>(seg, "labels")));
  }
  return out;
}

json clouds_to_json(const std::vector<PartitionCloud>& clouds) {
  json segments = json::array();
  for (const auto& c : clouds) {
    json parts = json::array();
    for (const auto& p : c.partitions) parts.push_back(p.labels());
    segments.push_back({{"segment", c.segment_index}, {"partitions", parts}});
  }
  return json{{"segments", segments}};
}

std::vector<PartitionCloud> clouds_from_json(const json& j) {
  std::vector<PartitionCloud> out;
  for (const auto& seg : get_field<json>(j, "segments")) {
    PartitionCloud c;
    c.segment_index = get_field<std::size_t>(seg, "segment");
    for (const auto& labels : get_field<json>(seg, "partitions")) c.partitions.push_back(labels_from_json(labels));
    c.validate();
    out.push_back(std::move(c));
  }
  return out;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw DataError(path.string() + ": write failed");
}

}  // namespace dynclust
