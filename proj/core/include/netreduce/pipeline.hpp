#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netreduce/aggregate.hpp"
#include "netreduce/graph.hpp"
#include "netreduce/ingest.hpp"
#include "netreduce/partition.hpp"

namespace netreduce {

struct OutputPaths {
  std::optional<std::filesystem::path> busmap;
  std::optional<std::filesystem::path> network_dir;
  std::optional<std::filesystem::path> membership;
  /// ".geojson" or ".dot"; the extension picks the format.
  std::optional<std::filesystem::path> viz;
};

struct PipelineConfig {
  LoaderSpec input;
  bool consolidate_parallel = false;
  StrategySpec partition;
  std::string profile = "generic";
  std::string node_prefix = "agg_";
  std::vector<DomainTransform> transforms;
  OutputPaths output;
};

/// Relative paths in [input] and [output] resolve against the directory of
/// the config file. Throws ConfigError naming the offending key.
PipelineConfig parse_config_file(const std::filesystem::path& path);
PipelineConfig parse_config(std::string_view toml, const std::filesystem::path& base_dir);

/// Resolves every referenced name (loader, algorithm, profile, transforms)
/// without touching input data.
void validate_config(const PipelineConfig& config);

/// Load plus optional consolidation.
Network prepare_network(const PipelineConfig& config);

struct AggregationOutput {
  Network network;
  Membership membership;
};

/// Tiers 1 to 3 under the configured profile and transforms.
AggregationOutput aggregate(const Network& prepared, const PartitionResult& p, const PipelineConfig& config);

struct PipelineResult {
  PartitionResult partition;
  Network aggregated;
  Membership membership;
};

/// The full chain. Outputs configured in `config.output` are written. Every
/// Error leaving this function carries a stage tag.
PipelineResult run_pipeline(const PipelineConfig& config);

/// Writes the busmap with its metadata sidecar, and the visualization of
/// the prepared network colored by cluster, when configured.
void write_partition_outputs(const PipelineConfig& config, const Network& prepared, const PartitionResult& p);
/// Writes the aggregated network directory and membership JSON when configured.
void write_aggregation_outputs(const PipelineConfig& config, const AggregationOutput& out);

/// Runs `fn`, tagging any escaping Error that has no stage yet with `stage`.
template <typename Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (Error& e) {
    if (e.stage().empty()) e.set_stage(stage);
    throw;
  }
}

}  // namespace netreduce
