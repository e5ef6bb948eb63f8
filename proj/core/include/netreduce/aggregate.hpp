#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "netreduce/graph.hpp"
#include "netreduce/partition.hpp"
#include "netreduce/registry.hpp"

namespace netreduce {

/// Links aggregated elements back to the originals. Entries follow the
/// aggregated network's node and edge order.
struct Membership {
  std::vector<std::pair<std::string, std::vector<std::string>>> node_members;
  std::vector<std::pair<std::string, std::vector<std::string>>> edge_members;
  std::vector<std::string> dropped_edges;  // intra-cluster, in source order
};

/// Reducer reference inside a profile. Built-in names: sum, mean,
/// weighted_mean (uses `weight`), min, max, first, count, concat_unique,
/// parallel_equivalent. Any registered name is accepted too.
struct Reducer {
  std::string name;
  std::string weight;

  static Reducer sum() { return {"sum", {}}; }
  static Reducer mean() { return {"mean", {}}; }
  static Reducer weighted_mean(std::string weight) { return {"weighted_mean", std::move(weight)}; }
  static Reducer min() { return {"min", {}}; }
  static Reducer max() { return {"max", {}}; }
  static Reducer first() { return {"first", {}}; }
  static Reducer count() { return {"count", {}}; }
  static Reducer concat_unique() { return {"concat_unique", {}}; }
  static Reducer parallel_equivalent() { return {"parallel_equivalent", {}}; }

  friend bool operator==(const Reducer&, const Reducer&) = default;
};

/// Values present on the members (absent ones already skipped) and, for
/// weighted reducers, the member weight aligned with each value.
using ReducerFn = std::function<std::optional<PropertyValue>(
    const std::vector<PropertyValue>& values, const std::vector<std::optional<double>>& weights)>;

Registry<ReducerFn>& reducer_registry();
void register_reducer(const std::string& name, ReducerFn fn);
/// Convenience overload for reducers that ignore weights.
void register_reducer(const std::string& name,
                      std::function<PropertyValue(const std::vector<PropertyValue>&)> fn);

struct AggregationProfile {
  std::string name;
  std::map<std::string, Reducer> node_rules;
  std::map<std::pair<EdgeKind, std::string>, Reducer> edge_rules;
  Reducer default_numeric = Reducer::sum();
  Reducer default_text = Reducer::first();

  /// Rule for a property, falling back to the default for its value type.
  Reducer node_rule(const std::string& property, const PropertyValue& sample) const;
  Reducer edge_rule(EdgeKind kind, const std::string& property, const PropertyValue& sample) const;
};

/// Throws UnknownStrategy when a rule names an unregistered reducer.
void validate_profile(const AggregationProfile& profile);

/// "generic" and "power-grid".
std::vector<AggregationProfile> builtin_profiles();
Registry<AggregationProfile>& profile_registry();
void register_profile(AggregationProfile profile);

struct DomainTransform {
  std::string name;
  Properties params;
};

using TransformFn = std::function<Network(const Network&, const Properties& params)>;

/// Built-ins:
///   add_edge(id?, u, v, kind?, <property>...)
///   set_property(target, property, value)
///   scale_property(target, property, factor)
/// `target` resolves to a node first, then an edge. The reserved names
/// r, x, s_nom, p_nom address edge electrical fields.
Registry<TransformFn>& transform_registry();
void register_transform(const std::string& name, TransformFn fn);

struct TopologyResult {
  Network network;
  Membership membership;
};

/// Tier 1: one node per cluster at the members' coordinate centroid, one
/// edge per (cluster pair, kind) with crossing edges as members, and no
/// reduced properties yet.
TopologyResult aggregate_topology(const Network& net, const PartitionResult& p,
                                  const std::string& prefix = "agg_");

/// Tier 2: transforms in list order.
Network apply_domain_transforms(const Network& net, const std::vector<DomainTransform>& transforms);

/// Tier 3: reduces member properties onto aggregated elements. Properties
/// already set on the skeleton (for example by tier 2) are kept.
Network aggregate_properties(const Network& skeleton, const Membership& m, const Network& source,
                             const AggregationProfile& profile);

/// Applies a reducer by reference to an already collected value list.
std::optional<PropertyValue> apply_reducer(const Reducer& reducer, const std::vector<PropertyValue>& values,
                                           const std::vector<std::optional<double>>& weights);

void write_membership_json(const Membership& m, const std::filesystem::path& path);
std::string membership_json(const Membership& m);

}  // namespace netreduce
