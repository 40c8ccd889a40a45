#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynclust/core.hpp"
#include "dynclust/generator.hpp"
#include "dynclust/resolver.hpp"

namespace dynclust {

// A temporal edge list with its nodes remapped to dense ids.
struct SnapData {
  DynamicGraph graph;
  std::vector<std::int64_t> original_ids;  // dense id -> id in the file, ascending
};

// Parses "SRC DST TIMESTAMP" lines with integer fields; blank lines and
// lines starting with '#' are skipped. Dense ids follow ascending original
// id. Errors name `source` and the line number; a file without edges is an
// error ("no edges").
SnapData read_snap(std::istream& is, const std::string& source = "<stream>");
SnapData ingest_snap(const std::filesystem::path& path);

// Writes integral timestamps as integers; throws ConfigError on a
// fractional timestamp since the format cannot carry it.
void write_snap(std::ostream& os, const DynamicGraph& g);

// {"original_ids": [...]}: position is the dense id.
nlohmann::json node_map_json(const SnapData& data);
void write_node_map(const std::filesystem::path& path, const SnapData& data);

// One "NODE BLOCK" line per node.
void write_ground_truth(std::ostream& os, const Partition& p);
Partition read_ground_truth(std::istream& is, const std::string& source = "<stream>");

nlohmann::json schedule_to_json(const BlockModelSchedule& model);
BlockModelSchedule schedule_from_json(const nlohmann::json& j);

// {"segments": [{"segment": s, "labels": [...]}, ...]}
nlohmann::json partitions_to_json(const std::vector<Partition>& reps);
std::vector<Partition> partitions_from_json(const nlohmann::json& j);

// {"segments": [{"segment": s, "partitions": [[...], ...]}, ...]}
nlohmann::json clouds_to_json(const std::vector<PartitionCloud>& clouds);
std::vector<PartitionCloud> clouds_from_json(const nlohmann::json& j);

// Reads and parses a JSON file; errors name the path.
nlohmann::json read_json_file(const std::filesystem::path& path);
// Writes j.dump(2) plus a newline. Object keys come out sorted.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace dynclust
