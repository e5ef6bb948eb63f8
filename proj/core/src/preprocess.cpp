#include "netreduce/preprocess.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "netreduce/error.hpp"

namespace netreduce {

namespace {

/// 1 / sum(1/v) over present values; a zero member short-circuits to zero.
std::optional<double> parallel_combine(const std::vector<std::optional<double>>& values) {
  double inverse_sum = 0.0;
  bool any = false;
  for (const auto& v : values) {
    if (!v) continue;
    if (*v == 0.0) return 0.0;
    inverse_sum += 1.0 / *v;
    any = true;
  }
  if (!any) return std::nullopt;
  return 1.0 / inverse_sum;
}

std::optional<double> sum_present(const std::vector<std::optional<double>>& values) {
  std::optional<double> total;
  for (const auto& v : values) {
    if (v) total = total.value_or(0.0) + *v;
  }
  return total;
}

double num_parallel_of(const Edge& e) {
  auto it = e.properties.find("num_parallel");
  if (it != e.properties.end() && it->second.is_number()) return it->second.as_number();
  return 1.0;
}

GroupLabeling labeling_from_components(const Network& net,
                                       const std::vector<std::vector<NodeIndex>>& components,
                                       GroupKind kind) {
  GroupLabeling g;
  g.kind = kind;
  g.labels.assign(net.node_count(), -1);
  for (std::size_t c = 0; c < components.size(); ++c) {
    for (NodeIndex i : components[c]) g.labels[i] = static_cast<int>(c);
  }
  for (const Node& n : net.nodes()) g.node_ids.push_back(n.id);
  return g;
}

}  // namespace

std::size_t GroupLabeling::group_count() const {
  if (labels.empty()) return 0;
  return static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1;
}

std::vector<std::vector<std::size_t>> GroupLabeling::members() const {
  std::vector<std::vector<std::size_t>> out(group_count());
  for (std::size_t i = 0; i < labels.size(); ++i) out[labels[i]].push_back(i);
  return out;
}

Network consolidate_parallel_edges(const Network& net) {
  using Key = std::tuple<NodeIndex, NodeIndex, EdgeKind>;
  std::map<Key, std::vector<EdgeIndex>> buckets;
  std::vector<Key> first_seen;
  for (EdgeIndex e = 0; e < net.edge_count(); ++e) {
    auto [u, v] = net.endpoints(e);
    Key key{std::min(u, v), std::max(u, v), net.edge(e).kind};
    auto [it, inserted] = buckets.try_emplace(key);
    if (inserted) first_seen.push_back(key);
    it->second.push_back(e);
  }

  std::vector<Edge> edges;
  edges.reserve(first_seen.size());
  for (const Key& key : first_seen) {
    const auto& members = buckets[key];
    if (members.size() == 1) {
      edges.push_back(net.edge(members.front()));
      continue;
    }
    EdgeIndex keeper = *std::min_element(members.begin(), members.end(), [&](EdgeIndex a, EdgeIndex b) {
      return net.edge(a).id < net.edge(b).id;
    });
    Edge merged = net.edge(keeper);

    std::vector<std::optional<double>> r, x, s_nom, p_nom;
    std::vector<std::string> ids;
    double num_parallel = 0.0;
    for (EdgeIndex m : members) {
      const Edge& e = net.edge(m);
      r.push_back(e.electrical.r);
      x.push_back(e.electrical.x);
      s_nom.push_back(e.electrical.s_nom);
      p_nom.push_back(e.electrical.p_nom);
      ids.push_back(e.id);
      num_parallel += num_parallel_of(e);
    }
    merged.electrical.r = parallel_combine(r);
    merged.electrical.x = parallel_combine(x);
    merged.electrical.s_nom = sum_present(s_nom);
    merged.electrical.p_nom = sum_present(p_nom);

    std::sort(ids.begin(), ids.end());
    std::string joined;
    for (const auto& id : ids) {
      if (!joined.empty()) joined.push_back(';');
      joined += id;
    }
    merged.properties.insert_or_assign("num_parallel", PropertyValue(num_parallel));
    merged.properties.insert_or_assign("member_ids", PropertyValue(joined));
    edges.push_back(std::move(merged));
  }

  Network out = build_network(net.nodes(), std::move(edges), Validation::Topology);
  out.metadata = net.metadata;
  return out;
}

GroupLabeling group_by_voltage(const Network& net) {
  std::set<double> levels;
  for (const Node& n : net.nodes()) {
    if (n.voltage_level) levels.insert(*n.voltage_level);
  }
  std::map<double, int> index;
  for (double v : levels) index.emplace(v, static_cast<int>(index.size()));
  const int absent_group = static_cast<int>(levels.size());

  GroupLabeling g;
  g.kind = GroupKind::VoltageLevel;
  for (const Node& n : net.nodes()) {
    g.node_ids.push_back(n.id);
    g.labels.push_back(n.voltage_level ? index.at(*n.voltage_level) : absent_group);
  }
  return g;
}

GroupLabeling detect_ac_islands(const Network& net) {
  return labeling_from_components(
      net, connected_components(net, {EdgeKind::AcLine, EdgeKind::Transformer}), GroupKind::AcIsland);
}

GroupLabeling single_group(const Network& net) {
  GroupLabeling g;
  g.kind = GroupKind::Single;
  for (const Node& n : net.nodes()) {
    g.node_ids.push_back(n.id);
    g.labels.push_back(0);
  }
  return g;
}

GroupLabeling combine_labelings(const GroupLabeling& a, const GroupLabeling& b) {
  if (a.node_ids != b.node_ids || a.labels.size() != b.labels.size()) {
    throw Error(ErrorCode::DomainMismatch, "labelings cover different node sets");
  }
  std::map<std::pair<int, int>, int> index;
  GroupLabeling out;
  out.kind = GroupKind::Combined;
  out.node_ids = a.node_ids;
  out.labels.reserve(a.labels.size());
  for (std::size_t i = 0; i < a.labels.size(); ++i) {
    auto [it, _] = index.try_emplace({a.labels[i], b.labels[i]}, static_cast<int>(index.size()));
    out.labels.push_back(it->second);
  }
  return out;
}

}  // namespace netreduce
