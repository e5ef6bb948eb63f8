#include "netreduce/aggregate.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <tuple>

#include <json.hpp>

#include "netreduce/error.hpp"

namespace netreduce {

namespace {

std::vector<double> numbers(const std::vector<PropertyValue>& values, std::string_view reducer) {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& v : values) {
    if (!v.is_number()) {
      throw Error(ErrorCode::ReducerTypeMismatch,
                  std::string(reducer) + " needs numeric values, got '" + v.to_string() + "'");
    }
    out.push_back(v.as_number());
  }
  return out;
}

std::optional<PropertyValue> reduce_sum(const std::vector<PropertyValue>& values,
                                        const std::vector<std::optional<double>>&) {
  if (values.empty()) return std::nullopt;
  double s = 0.0;
  for (double v : numbers(values, "sum")) s += v;
  return PropertyValue(s);
}

std::optional<PropertyValue> reduce_mean(const std::vector<PropertyValue>& values,
                                         const std::vector<std::optional<double>>&) {
  if (values.empty()) return std::nullopt;
  double s = 0.0;
  for (double v : numbers(values, "mean")) s += v;
  return PropertyValue(s / static_cast<double>(values.size()));
}

/// Members without a weight are skipped; with no usable weight at all the
/// plain mean is returned.
std::optional<PropertyValue> reduce_weighted_mean(const std::vector<PropertyValue>& values,
                                                  const std::vector<std::optional<double>>& weights) {
  if (values.empty()) return std::nullopt;
  auto xs = numbers(values, "weighted_mean");
  double sw = 0.0, swx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i < weights.size() && weights[i]) {
      sw += *weights[i];
      swx += *weights[i] * xs[i];
    }
  }
  if (sw > 0.0) return PropertyValue(swx / sw);
  return reduce_mean(values, weights);
}

std::optional<PropertyValue> reduce_min(const std::vector<PropertyValue>& values,
                                        const std::vector<std::optional<double>>&) {
  if (values.empty()) return std::nullopt;
  auto xs = numbers(values, "min");
  return PropertyValue(*std::min_element(xs.begin(), xs.end()));
}

std::optional<PropertyValue> reduce_max(const std::vector<PropertyValue>& values,
                                        const std::vector<std::optional<double>>&) {
  if (values.empty()) return std::nullopt;
  auto xs = numbers(values, "max");
  return PropertyValue(*std::max_element(xs.begin(), xs.end()));
}

std::optional<PropertyValue> reduce_first(const std::vector<PropertyValue>& values,
                                          const std::vector<std::optional<double>>&) {
  if (values.empty()) return std::nullopt;
  return values.front();
}

std::optional<PropertyValue> reduce_count(const std::vector<PropertyValue>& values,
                                          const std::vector<std::optional<double>>&) {
  return PropertyValue(static_cast<double>(values.size()));
}

std::optional<PropertyValue> reduce_concat_unique(const std::vector<PropertyValue>& values,
                                                  const std::vector<std::optional<double>>&) {
  if (values.empty()) return std::nullopt;
  std::vector<std::string> seen;
  for (const auto& v : values) {
    auto s = v.to_string();
    if (std::find(seen.begin(), seen.end(), s) == seen.end()) seen.push_back(std::move(s));
  }
  std::string joined;
  for (const auto& s : seen) {
    if (!joined.empty()) joined.push_back(';');
    joined += s;
  }
  return PropertyValue(joined);
}

std::optional<PropertyValue> reduce_parallel(const std::vector<PropertyValue>& values,
                                             const std::vector<std::optional<double>>&) {
  if (values.empty()) return std::nullopt;
  double inverse = 0.0;
  for (double v : numbers(values, "parallel_equivalent")) {
    if (!(v > 0.0)) {
      throw Error(ErrorCode::NonPositiveForParallel, "parallel_equivalent needs strictly positive values");
    }
    inverse += 1.0 / v;
  }
  return PropertyValue(1.0 / inverse);
}

Node* find_node_mut(std::vector<Node>& nodes, const std::string& id) {
  for (auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

Edge* find_edge_mut(std::vector<Edge>& edges, const std::string& id) {
  for (auto& e : edges) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

const PropertyValue& param(const Properties& params, const char* key, const char* transform) {
  auto it = params.find(key);
  if (it == params.end()) {
    throw Error(ErrorCode::ConfigError, std::string(transform) + " requires parameter '" + key + "'");
  }
  return it->second;
}

Network transform_add_edge(const Network& net, const Properties& params) {
  std::vector<Node> nodes = net.nodes();
  std::vector<Edge> edges = net.edges();
  Edge e;
  e.u = param(params, "u", "add_edge").to_string();
  e.v = param(params, "v", "add_edge").to_string();
  for (const auto& endpoint : {e.u, e.v}) {
    if (!net.find_node(endpoint)) {
      throw Error(ErrorCode::UnknownNodeId, "add_edge references unknown node '" + endpoint + "'");
    }
  }
  if (auto it = params.find("id"); it != params.end()) {
    e.id = it->second.to_string();
  } else {
    e.id = "added_" + std::to_string(edges.size());
  }
  if (auto it = params.find("kind"); it != params.end()) {
    auto kind = parse_edge_kind(it->second.to_string());
    if (!kind) throw Error(ErrorCode::ConfigError, "add_edge: unknown edge kind '" + it->second.to_string() + "'");
    e.kind = *kind;
  }
  for (const auto& [key, value] : params) {
    if (key == "id" || key == "u" || key == "v" || key == "kind") continue;
    if (is_electrical_field(key)) {
      set_electrical_field(e.electrical, key, value.as_number());
    } else {
      e.properties.insert_or_assign(key, value);
    }
  }
  edges.push_back(std::move(e));
  Network out = build_network(std::move(nodes), std::move(edges), Validation::Topology);
  out.metadata = net.metadata;
  return out;
}

/// Applies `update` to the named property of the node or edge `target`.
template <typename Update>
Network update_property(const Network& net, const Properties& params, const char* transform, Update update) {
  std::vector<Node> nodes = net.nodes();
  std::vector<Edge> edges = net.edges();
  const std::string property = param(params, "property", transform).to_string();

  auto [target, as_edge] = [&]() -> std::pair<std::string, bool> {
    if (auto it = params.find("node"); it != params.end()) return {it->second.to_string(), false};
    if (auto it = params.find("edge"); it != params.end()) return {it->second.to_string(), true};
    std::string id = param(params, "target", transform).to_string();
    return {id, !net.find_node(id) && net.find_edge(id).has_value()};
  }();

  if (!as_edge) {
    Node* n = find_node_mut(nodes, target);
    if (!n) throw Error(ErrorCode::UnknownNodeId, std::string(transform) + ": unknown node '" + target + "'");
    std::optional<PropertyValue> current;
    if (auto it = n->properties.find(property); it != n->properties.end()) current = it->second;
    n->properties.insert_or_assign(property, update(current, property));
  } else {
    Edge* e = find_edge_mut(edges, target);
    if (!e) throw Error(ErrorCode::UnknownEdgeId, std::string(transform) + ": unknown edge '" + target + "'");
    if (is_electrical_field(property)) {
      std::optional<PropertyValue> current;
      if (auto v = electrical_field(e->electrical, property)) current = PropertyValue(*v);
      set_electrical_field(e->electrical, property, update(current, property).as_number());
    } else {
      std::optional<PropertyValue> current;
      if (auto it = e->properties.find(property); it != e->properties.end()) current = it->second;
      e->properties.insert_or_assign(property, update(current, property));
    }
  }
  Network out = build_network(std::move(nodes), std::move(edges), Validation::Topology);
  out.metadata = net.metadata;
  return out;
}

Network transform_set_property(const Network& net, const Properties& params) {
  const PropertyValue value = param(params, "value", "set_property");
  return update_property(net, params, "set_property",
                         [&](const std::optional<PropertyValue>&, const std::string&) { return value; });
}

Network transform_scale_property(const Network& net, const Properties& params) {
  const double factor = param(params, "factor", "scale_property").as_number();
  return update_property(net, params, "scale_property",
                         [&](const std::optional<PropertyValue>& current, const std::string& property) {
                           if (!current || !current->is_number()) {
                             throw Error(ErrorCode::UnknownProperty,
                                         "scale_property: no numeric property '" + property + "' on target");
                           }
                           return PropertyValue(current->as_number() * factor);
                         });
}

void check_reducer(const Reducer& r) {
  if (!reducer_registry().contains(r.name)) {
    throw Error(ErrorCode::UnknownStrategy, "unknown reducer '" + r.name + "'");
  }
  if (r.name == "weighted_mean" && r.weight.empty()) {
    throw Error(ErrorCode::ConfigError, "weighted_mean needs a weight property");
  }
}

std::optional<double> weight_of(const Edge& e, const std::string& name) {
  if (is_electrical_field(name)) return electrical_field(e.electrical, name);
  auto it = e.properties.find(name);
  if (it != e.properties.end() && it->second.is_number()) return it->second.as_number();
  return std::nullopt;
}

std::optional<double> weight_of(const Node& n, const std::string& name) {
  auto it = n.properties.find(name);
  if (it != n.properties.end() && it->second.is_number()) return it->second.as_number();
  return std::nullopt;
}

}  // namespace

Registry<ReducerFn>& reducer_registry() {
  static Registry<ReducerFn> registry("reducer");
  static const bool seeded = [](Registry<ReducerFn>& r) {
    r.add("sum", reduce_sum);
    r.add("mean", reduce_mean);
    r.add("weighted_mean", reduce_weighted_mean);
    r.add("min", reduce_min);
    r.add("max", reduce_max);
    r.add("first", reduce_first);
    r.add("count", reduce_count);
    r.add("concat_unique", reduce_concat_unique);
    r.add("parallel_equivalent", reduce_parallel);
    return true;
  }(registry);
  (void)seeded;
  return registry;
}

void register_reducer(const std::string& name, ReducerFn fn) { reducer_registry().add(name, std::move(fn)); }

void register_reducer(const std::string& name, std::function<PropertyValue(const std::vector<PropertyValue>&)> fn) {
  register_reducer(name, ReducerFn([fn = std::move(fn)](const std::vector<PropertyValue>& values,
                                                        const std::vector<std::optional<double>>&)
                                       -> std::optional<PropertyValue> {
    if (values.empty()) return std::nullopt;
    return fn(values);
  }));
}

std::optional<PropertyValue> apply_reducer(const Reducer& reducer, const std::vector<PropertyValue>& values,
                                           const std::vector<std::optional<double>>& weights) {
  return reducer_registry().get(reducer.name)(values, weights);
}

Reducer AggregationProfile::node_rule(const std::string& property, const PropertyValue& sample) const {
  if (auto it = node_rules.find(property); it != node_rules.end()) return it->second;
  return sample.is_number() ? default_numeric : default_text;
}

Reducer AggregationProfile::edge_rule(EdgeKind kind, const std::string& property, const PropertyValue& sample) const {
  if (auto it = edge_rules.find({kind, property}); it != edge_rules.end()) return it->second;
  return sample.is_number() ? default_numeric : default_text;
}

void validate_profile(const AggregationProfile& profile) {
  check_reducer(profile.default_numeric);
  check_reducer(profile.default_text);
  for (const auto& [_, r] : profile.node_rules) check_reducer(r);
  for (const auto& [_, r] : profile.edge_rules) check_reducer(r);
}

std::vector<AggregationProfile> builtin_profiles() {
  // Coordinates are averaged by the topology tier in both profiles.
  AggregationProfile generic;
  generic.name = "generic";

  AggregationProfile grid;
  grid.name = "power-grid";
  for (const char* load : {"load", "p_set", "q_set", "p_nom"}) grid.node_rules[load] = Reducer::sum();
  for (EdgeKind kind : {EdgeKind::AcLine, EdgeKind::Transformer}) {
    grid.edge_rules[{kind, "x"}] = Reducer::parallel_equivalent();
    grid.edge_rules[{kind, "r"}] = Reducer::parallel_equivalent();
    grid.edge_rules[{kind, "s_nom"}] = Reducer::sum();
    grid.edge_rules[{kind, "num_parallel"}] = Reducer::sum();
    grid.edge_rules[{kind, "length"}] = Reducer::weighted_mean("s_nom");
  }
  for (EdgeKind kind : {EdgeKind::Converter, EdgeKind::DcLink}) grid.edge_rules[{kind, "p_nom"}] = Reducer::sum();
  return {generic, grid};
}

Registry<AggregationProfile>& profile_registry() {
  static Registry<AggregationProfile> registry("aggregation profile");
  static const bool seeded = [](Registry<AggregationProfile>& r) {
    for (auto& p : builtin_profiles()) r.add(p.name, p);
    return true;
  }(registry);
  (void)seeded;
  return registry;
}

void register_profile(AggregationProfile profile) {
  validate_profile(profile);
  const std::string name = profile.name;
  profile_registry().add(name, std::move(profile));
}

Registry<TransformFn>& transform_registry() {
  static Registry<TransformFn> registry("domain transform");
  static const bool seeded = [](Registry<TransformFn>& r) {
    r.add("add_edge", transform_add_edge);
    r.add("set_property", transform_set_property);
    r.add("scale_property", transform_scale_property);
    return true;
  }(registry);
  (void)seeded;
  return registry;
}

void register_transform(const std::string& name, TransformFn fn) { transform_registry().add(name, std::move(fn)); }

TopologyResult aggregate_topology(const Network& net, const PartitionResult& p, const std::string& prefix) {
  if (p.assignment.size() != net.node_count() || p.node_ids.size() != net.node_count()) {
    throw Error(ErrorCode::PartitionDomainMismatch, "partition does not cover the network's nodes");
  }
  std::vector<int> cluster(net.node_count(), -1);
  for (std::size_t i = 0; i < p.node_ids.size(); ++i) {
    auto idx = net.find_node(p.node_ids[i]);
    if (!idx) throw Error(ErrorCode::PartitionDomainMismatch, "partition names unknown node '" + p.node_ids[i] + "'");
    if (p.assignment[i] < 0 || static_cast<std::size_t>(p.assignment[i]) >= p.cluster_count) {
      throw Error(ErrorCode::PartitionDomainMismatch, "cluster id out of range for node '" + p.node_ids[i] + "'");
    }
    cluster[*idx] = p.assignment[i];
  }
  if (std::find(cluster.begin(), cluster.end(), -1) != cluster.end()) {
    throw Error(ErrorCode::PartitionDomainMismatch, "partition is not total over the network");
  }

  TopologyResult out;
  const std::size_t clusters = p.cluster_count;
  std::vector<std::vector<NodeIndex>> members(clusters);
  for (NodeIndex i = 0; i < net.node_count(); ++i) members[cluster[i]].push_back(i);

  std::vector<Node> nodes;
  nodes.reserve(clusters);
  for (std::size_t c = 0; c < clusters; ++c) {
    if (members[c].empty()) {
      throw Error(ErrorCode::PartitionDomainMismatch, "cluster " + std::to_string(c) + " has no members");
    }
    Node agg;
    agg.id = prefix + std::to_string(c);
    bool all_coords = true;
    double lon = 0.0, lat = 0.0;
    std::set<double> levels;
    bool any_level_missing = false;
    std::vector<std::string> ids;
    for (NodeIndex i : members[c]) {
      const Node& n = net.node(i);
      ids.push_back(n.id);
      if (n.coords) {
        lon += n.coords->lon;
        lat += n.coords->lat;
      } else {
        all_coords = false;
      }
      if (n.voltage_level) levels.insert(*n.voltage_level);
      else any_level_missing = true;
    }
    if (all_coords) {
      const auto count = static_cast<double>(members[c].size());
      agg.coords = Coordinates{lon / count, lat / count};
    }
    if (levels.size() == 1 && !any_level_missing) agg.voltage_level = *levels.begin();
    out.membership.node_members.emplace_back(agg.id, std::move(ids));
    nodes.push_back(std::move(agg));
  }

  using Key = std::tuple<int, int, EdgeKind>;
  std::map<Key, std::size_t> slot;
  std::vector<Edge> edges;
  for (EdgeIndex e = 0; e < net.edge_count(); ++e) {
    auto [u, v] = net.endpoints(e);
    const Edge& edge = net.edge(e);
    int cu = cluster[u], cv = cluster[v];
    if (cu == cv) {
      out.membership.dropped_edges.push_back(edge.id);
      continue;
    }
    Key key{std::min(cu, cv), std::max(cu, cv), edge.kind};
    auto [it, inserted] = slot.try_emplace(key, edges.size());
    if (inserted) {
      Edge agg;
      agg.id = prefix + std::to_string(std::get<0>(key)) + "_" + std::to_string(std::get<1>(key)) + "_" +
               std::string(to_string(edge.kind));
      agg.u = prefix + std::to_string(std::get<0>(key));
      agg.v = prefix + std::to_string(std::get<1>(key));
      agg.kind = edge.kind;
      out.membership.edge_members.emplace_back(agg.id, std::vector<std::string>{});
      edges.push_back(std::move(agg));
    }
    out.membership.edge_members[it->second].second.push_back(edge.id);
  }

  out.network = build_network(std::move(nodes), std::move(edges), Validation::Topology);
  out.network.metadata = net.metadata;
  return out;
}

Network apply_domain_transforms(const Network& net, const std::vector<DomainTransform>& transforms) {
  for (const auto& t : transforms) {
    if (!transform_registry().contains(t.name)) {
      throw Error(ErrorCode::UnknownTransform, "unknown domain transform '" + t.name + "'");
    }
  }
  Network current = net;
  for (const auto& t : transforms) current = transform_registry().get(t.name)(current, t.params);
  return current;
}

Network aggregate_properties(const Network& skeleton, const Membership& m, const Network& source,
                             const AggregationProfile& profile) {
  validate_profile(profile);
  std::vector<Node> nodes = skeleton.nodes();
  std::vector<Edge> edges = skeleton.edges();

  for (const auto& [agg_id, member_ids] : m.node_members) {
    auto idx = skeleton.find_node(agg_id);
    if (!idx) throw Error(ErrorCode::PartitionDomainMismatch, "membership names unknown node '" + agg_id + "'");
    Node& target = nodes[*idx];
    std::vector<const Node*> members;
    std::set<std::string> names;
    for (const auto& id : member_ids) {
      const Node& n = source.node(source.node_index(id));
      members.push_back(&n);
      for (const auto& [name, _] : n.properties) names.insert(name);
    }
    for (const auto& name : names) {
      if (target.properties.contains(name)) continue;
      std::vector<PropertyValue> values;
      std::vector<std::optional<double>> weights;
      for (const Node* n : members) {
        auto it = n->properties.find(name);
        if (it == n->properties.end()) continue;
        values.push_back(it->second);
      }
      Reducer rule = profile.node_rule(name, values.front());
      for (const Node* n : members) {
        if (n->properties.contains(name)) weights.push_back(rule.weight.empty() ? std::nullopt : weight_of(*n, rule.weight));
      }
      if (auto v = apply_reducer(rule, values, weights)) target.properties.insert_or_assign(name, std::move(*v));
    }
  }

  for (const auto& [agg_id, member_ids] : m.edge_members) {
    auto idx = skeleton.find_edge(agg_id);
    if (!idx) throw Error(ErrorCode::PartitionDomainMismatch, "membership names unknown edge '" + agg_id + "'");
    Edge& target = edges[*idx];
    std::vector<const Edge*> members;
    std::set<std::string> names;
    for (const auto& id : member_ids) {
      const Edge& e = source.edge(source.edge_index(id));
      members.push_back(&e);
      for (const auto& [name, _] : e.properties) names.insert(name);
    }

    auto reduce = [&](const std::string& name, auto read) -> std::optional<PropertyValue> {
      std::vector<PropertyValue> values;
      std::vector<const Edge*> holders;
      for (const Edge* e : members) {
        if (auto v = read(*e)) {
          values.push_back(std::move(*v));
          holders.push_back(e);
        }
      }
      if (values.empty()) return std::nullopt;
      Reducer rule = profile.edge_rule(target.kind, name, values.front());
      std::vector<std::optional<double>> weights;
      if (!rule.weight.empty()) {
        for (const Edge* e : holders) weights.push_back(weight_of(*e, rule.weight));
      }
      return apply_reducer(rule, values, weights);
    };

    for (auto field : kElectricalFieldNames) {
      if (electrical_field(target.electrical, field)) continue;
      const std::string name(field);
      auto v = reduce(name, [&](const Edge& e) -> std::optional<PropertyValue> {
        if (auto x = electrical_field(e.electrical, name)) return PropertyValue(*x);
        return std::nullopt;
      });
      if (!v) continue;
      if (!v->is_number()) {
        throw Error(ErrorCode::ReducerTypeMismatch, "reducer for '" + name + "' must produce a number");
      }
      set_electrical_field(target.electrical, name, v->as_number());
    }
    for (const auto& name : names) {
      if (target.properties.contains(name)) continue;
      auto v = reduce(name, [&](const Edge& e) -> std::optional<PropertyValue> {
        auto it = e.properties.find(name);
        if (it == e.properties.end()) return std::nullopt;
        return it->second;
      });
      if (v) target.properties.insert_or_assign(name, std::move(*v));
    }
  }

  Network out = build_network(std::move(nodes), std::move(edges), Validation::Full);
  out.metadata = skeleton.metadata;
  return out;
}

std::string membership_json(const Membership& m) {
  nlohmann::ordered_json clusters = nlohmann::ordered_json::object();
  for (const auto& [id, members] : m.node_members) clusters[id] = members;
  nlohmann::ordered_json edges = nlohmann::ordered_json::object();
  for (const auto& [id, members] : m.edge_members) edges[id] = members;
  nlohmann::ordered_json doc{
      {"nodes", clusters},
      {"edges", edges},
      {"dropped_edges", m.dropped_edges},
  };
  return doc.dump(2) + "\n";
}

void write_membership_json(const Membership& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << membership_json(m);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace netreduce
