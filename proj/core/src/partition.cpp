#include "netreduce/partition.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "netreduce/csv.hpp"
#include "netreduce/error.hpp"

namespace netreduce {

namespace {

const DistanceMatrix& as_matrix(const PartitionInput& in, std::string_view who) {
  if (auto* m = std::get_if<std::reference_wrapper<const DistanceMatrix>>(&in)) return m->get();
  throw Error(ErrorCode::StrategyContractViolation, std::string(who) + " expects a distance matrix");
}

const FeatureMatrix& as_features(const PartitionInput& in, std::string_view who) {
  if (auto* f = std::get_if<std::reference_wrapper<const FeatureMatrix>>(&in)) return f->get();
  throw Error(ErrorCode::StrategyContractViolation, std::string(who) + " expects a feature matrix");
}

void register_builtins(Registry<Partitioner>& r) {
  r.add("kmeans", {InputForm::Features,
                   [](const PartitionInput& in, const StrategySpec& s) {
                     return PartitionOutput{kmeans(as_features(in, "kmeans"), *s.k, s.seed, s.max_iter).labels, {}};
                   },
                   true});
  r.add("kmedoids", {InputForm::Matrix,
                     [](const PartitionInput& in, const StrategySpec& s) {
                       return PartitionOutput{kmedoids(as_matrix(in, "kmedoids"), *s.k, s.seed, s.max_iter).labels, {}};
                     },
                     true});
  r.add("dbscan", {InputForm::Matrix,
                   [](const PartitionInput& in, const StrategySpec& s) {
                     auto res = dbscan(as_matrix(in, "dbscan"), *s.eps, *s.min_pts);
                     return PartitionOutput{std::move(res.labels), std::move(res.noise)};
                   },
                   false});
  for (Linkage linkage : {Linkage::Single, Linkage::Complete, Linkage::Average, Linkage::Ward}) {
    std::string name = "agglomerative-" + std::string(to_string(linkage));
    r.add(name, {InputForm::Matrix,
                 [linkage, name](const PartitionInput& in, const StrategySpec& s) {
                   return PartitionOutput{agglomerative(as_matrix(in, name), *s.k, linkage), {}};
                 },
                 true});
  }
}

void check_output(const PartitionOutput& out, std::size_t n, const std::string& algorithm) {
  if (out.labels.size() != n) {
    throw Error(ErrorCode::StrategyContractViolation,
                "strategy '" + algorithm + "' returned " + std::to_string(out.labels.size()) +
                    " labels for " + std::to_string(n) + " nodes");
  }
  for (int l : out.labels) {
    if (l < 0) {
      throw Error(ErrorCode::StrategyContractViolation,
                  "strategy '" + algorithm + "' left a node unassigned (negative label)");
    }
  }
  for (auto i : out.noise) {
    if (i >= n) throw Error(ErrorCode::StrategyContractViolation, "noise index out of range");
  }
}

int max_label(const Labels& labels) {
  return labels.empty() ? -1 : *std::max_element(labels.begin(), labels.end());
}

}  // namespace

int PartitionResult::cluster_of(std::string_view node_id) const {
  for (std::size_t i = 0; i < node_ids.size(); ++i) {
    if (node_ids[i] == node_id) return assignment[i];
  }
  throw Error(ErrorCode::UnknownNodeId, "node '" + std::string(node_id) + "' is not in the partition");
}

std::vector<std::vector<std::size_t>> PartitionResult::members() const {
  std::vector<std::vector<std::size_t>> out(cluster_count);
  for (std::size_t i = 0; i < assignment.size(); ++i) out[assignment[i]].push_back(i);
  return out;
}

Registry<Partitioner>& partitioner_registry() {
  static Registry<Partitioner> registry("partitioning strategy");
  static const bool seeded = (register_builtins(registry), true);
  (void)seeded;
  return registry;
}

void register_partitioner(const std::string& name, Partitioner partitioner) {
  partitioner_registry().add(name, std::move(partitioner));
}

void validate_strategy(const StrategySpec& spec) {
  if (spec.algorithm.empty()) throw Error(ErrorCode::ConfigError, "partition.algorithm is required");
  Partitioner p = partitioner_registry().get(spec.algorithm);
  if (p.needs_k && !spec.k) {
    throw Error(ErrorCode::ConfigError, "partition.k is required for '" + spec.algorithm + "'");
  }
  if (spec.algorithm == "dbscan") {
    if (!spec.eps) throw Error(ErrorCode::ConfigError, "partition.eps is required for 'dbscan'");
    if (!spec.min_pts) throw Error(ErrorCode::ConfigError, "partition.min_pts is required for 'dbscan'");
  }
  if (spec.max_iter < 1) throw Error(ErrorCode::ConfigError, "partition.max_iter must be positive");
}

GroupLabeling awareness_groups(const Network& net, const StrategySpec& spec) {
  GroupLabeling groups = single_group(net);
  if (spec.voltage_aware) groups = combine_labelings(groups, group_by_voltage(net));
  bool island_aware = spec.island_aware.value_or(net.has_non_generic_edges());
  if (island_aware) groups = combine_labelings(groups, detect_ac_islands(net));
  return groups;
}

std::vector<int> reindex_by_first_member(const std::vector<int>& labels) {
  std::map<int, int> index;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) {
    auto [it, _] = index.try_emplace(l, static_cast<int>(index.size()));
    out.push_back(it->second);
  }
  return out;
}

PartitionResult partition(const Network& net, const StrategySpec& spec) {
  validate_strategy(spec);
  const auto started = std::chrono::steady_clock::now();
  const Partitioner p = partitioner_registry().get(spec.algorithm);
  const std::size_t n = net.node_count();
  if (p.needs_k && (*spec.k < 1 || static_cast<std::size_t>(*spec.k) > n)) {
    throw Error(ErrorCode::InvalidK, "k=" + std::to_string(*spec.k) + " must lie in [1, " + std::to_string(n) + "]");
  }
  if (spec.family == DistanceFamily::Electrical &&
      std::none_of(net.edges().begin(), net.edges().end(), [](const Edge& e) { return is_ac(e.kind); })) {
    throw Error(ErrorCode::InvalidParameter, "electrical distance needs at least one AC branch");
  }

  const GroupLabeling groups = awareness_groups(net, spec);
  const auto group_members = groups.members();

  PartitionOutput out;
  if (p.form == InputForm::Matrix) {
    DistanceMatrix base = spec.family == DistanceFamily::Geographical ? geo_distance_matrix(net)
                                                                      : electrical_distance_matrix(net);
    DistanceMatrix masked = apply_infinity_mask(base, groups);
    out = p.fn(std::cref(masked), spec);
    check_output(out, n, spec.algorithm);
  } else {
    FeatureMatrix features = feature_matrix(net, spec.family);
    std::vector<int> budget;
    if (p.needs_k) {
      std::vector<int> sizes;
      for (const auto& m : group_members) sizes.push_back(static_cast<int>(m.size()));
      budget = allocate_cluster_budget(sizes, *spec.k);
    }
    out.labels.assign(n, 0);
    int offset = 0;
    for (std::size_t g = 0; g < group_members.size(); ++g) {
      const auto& members = group_members[g];
      FeatureMatrix sub = features.subset(members);
      StrategySpec local = spec;
      if (p.needs_k) local.k = budget[g];
      PartitionOutput part = p.fn(std::cref(sub), local);
      check_output(part, members.size(), spec.algorithm);
      for (std::size_t i = 0; i < members.size(); ++i) out.labels[members[i]] = part.labels[i] + offset;
      for (auto i : part.noise) out.noise.push_back(members[i]);
      offset += max_label(part.labels) + 1;
    }
  }

  // No cluster may cross a group boundary, whatever the strategy did.
  std::map<int, int> cluster_group;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = cluster_group.try_emplace(out.labels[i], groups.labels[i]);
    if (!inserted && it->second != groups.labels[i]) {
      throw Error(ErrorCode::StrategyContractViolation,
                  "strategy '" + spec.algorithm + "' produced a cluster spanning voltage levels or AC islands");
    }
  }

  PartitionResult result;
  result.strategy = spec;
  for (const Node& node : net.nodes()) result.node_ids.push_back(node.id);
  result.assignment = reindex_by_first_member(out.labels);
  result.cluster_count = static_cast<std::size_t>(max_label(result.assignment) + 1);
  std::sort(out.noise.begin(), out.noise.end());
  for (auto i : out.noise) result.noise_singletons.push_back(result.node_ids[i]);
  for (std::size_t g = 0; g < group_members.size(); ++g) {
    std::set<int> clusters;
    for (auto i : group_members[g]) clusters.insert(result.assignment[i]);
    result.group_breakdown.push_back({static_cast<int>(g), group_members[g].size(), clusters.size()});
  }
  result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

void write_busmap(const PartitionResult& result, const std::filesystem::path& path) {
  csv::Table t;
  t.header = {"node_id", "cluster_id"};
  for (std::size_t i = 0; i < result.node_ids.size(); ++i) {
    t.rows.push_back({result.node_ids[i], std::to_string(result.assignment[i])});
  }
  csv::write_file(path, t);
}

std::filesystem::path metadata_path_for(const std::filesystem::path& busmap_path) {
  auto p = busmap_path;
  p.replace_extension(".meta.json");
  return p;
}

void write_partition_metadata(const PartitionResult& result, const std::filesystem::path& path) {
  const StrategySpec& s = result.strategy;
  nlohmann::ordered_json strategy{
      {"algorithm", s.algorithm},
      {"family", std::string(to_string(s.family))},
      {"voltage_aware", s.voltage_aware},
      {"island_aware", s.island_aware ? nlohmann::ordered_json(*s.island_aware) : nlohmann::ordered_json("auto")},
      {"seed", s.seed},
      {"max_iter", s.max_iter},
  };
  if (s.k) strategy["k"] = *s.k;
  if (s.eps) strategy["eps"] = *s.eps;
  if (s.min_pts) strategy["min_pts"] = *s.min_pts;

  nlohmann::ordered_json breakdown = nlohmann::ordered_json::array();
  for (const auto& g : result.group_breakdown) {
    breakdown.push_back({{"group", g.group}, {"nodes", g.nodes}, {"clusters", g.clusters}});
  }
  nlohmann::ordered_json doc{
      {"strategy", strategy},
      {"node_count", result.node_ids.size()},
      {"cluster_count", result.cluster_count},
      {"noise_singletons", result.noise_singletons},
      {"group_breakdown", breakdown},
      {"wall_time", result.wall_time},
  };
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

PartitionResult partition_from_labels(const Network& net, const std::vector<int>& labels) {
  if (labels.size() != net.node_count()) {
    throw Error(ErrorCode::PartitionDomainMismatch, "busmap does not cover every node");
  }
  const int top = max_label(labels);
  std::vector<bool> used(static_cast<std::size_t>(top + 1), false);
  for (int l : labels) {
    if (l < 0) throw Error(ErrorCode::MalformedInput, "cluster ids must be nonnegative");
    used[l] = true;
  }
  if (std::find(used.begin(), used.end(), false) != used.end()) {
    throw Error(ErrorCode::MalformedInput, "cluster ids must be contiguous from 0");
  }
  PartitionResult result;
  result.strategy.algorithm = "busmap";
  for (const Node& node : net.nodes()) result.node_ids.push_back(node.id);
  result.assignment = labels;
  result.cluster_count = static_cast<std::size_t>(top + 1);
  result.group_breakdown.push_back({0, labels.size(), result.cluster_count});
  return result;
}

PartitionResult read_busmap(const Network& net, const std::filesystem::path& path) {
  auto table = csv::read_file(path);
  const auto id_col = table.require("node_id", path.filename().string());
  const auto cluster_col = table.require("cluster_id", path.filename().string());
  std::vector<int> labels(net.node_count(), -1);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    auto idx = net.find_node(row[id_col]);
    if (!idx) {
      throw Error(ErrorCode::PartitionDomainMismatch, "busmap names unknown node '" + row[id_col] + "'");
    }
    auto value = csv::parse_number(row[cluster_col]);
    if (!value || *value != std::floor(*value) || *value < 0 || *value > 1e9) {
      throw Error(ErrorCode::MalformedInput, "busmap row " + std::to_string(r + 2) + ": bad cluster id");
    }
    if (labels[*idx] >= 0) {
      throw Error(ErrorCode::PartitionDomainMismatch, "busmap lists node '" + row[id_col] + "' twice");
    }
    labels[*idx] = static_cast<int>(*value);
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) {
      throw Error(ErrorCode::PartitionDomainMismatch, "busmap is missing node '" + net.node(i).id + "'");
    }
  }
  return partition_from_labels(net, labels);
}

}  // namespace netreduce
