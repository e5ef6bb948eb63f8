#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "netreduce/clustering.hpp"
#include "netreduce/distance.hpp"
#include "netreduce/graph.hpp"
#include "netreduce/preprocess.hpp"
#include "netreduce/registry.hpp"

namespace netreduce {

struct StrategySpec {
  std::string algorithm;
  DistanceFamily family = DistanceFamily::Geographical;
  bool voltage_aware = false;
  /// Unset means: on when the network has any non-Generic edge.
  std::optional<bool> island_aware;
  std::optional<int> k;
  std::optional<double> eps;
  std::optional<int> min_pts;
  std::uint64_t seed = 0;
  int max_iter = 300;
};

struct GroupStat {
  int group = 0;
  std::size_t nodes = 0;
  std::size_t clusters = 0;
};

/// Total busmap plus run metadata. `assignment[i]` is the cluster of
/// `node_ids[i]`; cluster ids are dense and numbered by smallest member.
struct PartitionResult {
  std::vector<std::string> node_ids;
  std::vector<int> assignment;
  StrategySpec strategy;
  std::size_t cluster_count = 0;
  std::vector<std::string> noise_singletons;
  std::vector<GroupStat> group_breakdown;
  double wall_time = 0.0;  // seconds

  int cluster_of(std::string_view node_id) const;  // throws UnknownNodeId
  std::vector<std::vector<std::size_t>> members() const;
};

enum class InputForm { Matrix, Features };

using PartitionInput =
    std::variant<std::reference_wrapper<const DistanceMatrix>, std::reference_wrapper<const FeatureMatrix>>;

struct PartitionOutput {
  Labels labels;
  std::vector<std::size_t> noise;  // point indices reported as noise
};

using PartitionFn = std::function<PartitionOutput(const PartitionInput&, const StrategySpec&)>;

struct Partitioner {
  InputForm form = InputForm::Matrix;
  PartitionFn fn;
  /// Whether the strategy consumes spec.k (checked before any work).
  bool needs_k = true;
};

/// Built-ins: kmeans, kmedoids, dbscan, agglomerative-{single,complete,average,ward}.
Registry<Partitioner>& partitioner_registry();
void register_partitioner(const std::string& name, Partitioner partitioner);

/// Checks that the strategy names a registered algorithm and carries the
/// parameters it needs. Throws UnknownStrategy or ConfigError.
void validate_strategy(const StrategySpec& spec);

/// Grouping the strategy asks for on this network: voltage levels and/or AC
/// islands, combined; a single group when neither applies.
GroupLabeling awareness_groups(const Network& net, const StrategySpec& spec);

/// Maps every node to a cluster without touching the network.
PartitionResult partition(const Network& net, const StrategySpec& spec);

/// Dense re-indexing ordered by smallest member index.
std::vector<int> reindex_by_first_member(const std::vector<int>& labels);

/// CSV busmap (node_id, cluster_id) in network order.
void write_busmap(const PartitionResult& result, const std::filesystem::path& path);
/// JSON sidecar with the strategy echo, counts and wall time.
void write_partition_metadata(const PartitionResult& result, const std::filesystem::path& path);
std::filesystem::path metadata_path_for(const std::filesystem::path& busmap_path);

/// Reads a busmap and checks it is a total mapping over `net` with cluster
/// ids 0..C-1. Throws PartitionDomainMismatch when nodes are missing or
/// unknown, MalformedInput when ids are not dense.
PartitionResult read_busmap(const Network& net, const std::filesystem::path& path);

/// Wraps dense labels over `net` (ids kept as given) in a PartitionResult.
PartitionResult partition_from_labels(const Network& net, const std::vector<int>& labels);

}  // namespace netreduce
