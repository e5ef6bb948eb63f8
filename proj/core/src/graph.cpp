#include "netreduce/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_set>

#include "netreduce/error.hpp"

namespace netreduce {

namespace {

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

bool close(double a, double b, double rel_tol) {
  if (a == b) return true;
  return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
}

bool close(const std::optional<double>& a, const std::optional<double>& b, double rel_tol) {
  if (a.has_value() != b.has_value()) return false;
  return !a || close(*a, *b, rel_tol);
}

bool close(const Properties& a, const Properties& b, double rel_tol) {
  if (a.size() != b.size()) return false;
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    const auto& va = ia->second;
    const auto& vb = ib->second;
    if (va.is_number() && vb.is_number()) {
      if (!close(va.as_number(), vb.as_number(), rel_tol)) return false;
    } else if (!(va == vb)) {
      return false;
    }
  }
  return true;
}

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;  // root is always the smallest member
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

PropertyValue::PropertyValue(double number) : value_(number) {
  if (!std::isfinite(number)) {
    throw Error(ErrorCode::InvalidAttribute, "property numbers must be finite");
  }
}

double PropertyValue::as_number() const {
  if (!is_number()) throw Error(ErrorCode::ReducerTypeMismatch, "property is not a number");
  return std::get<double>(value_);
}

const std::string& PropertyValue::as_text() const {
  if (!is_text()) throw Error(ErrorCode::ReducerTypeMismatch, "property is not text");
  return std::get<std::string>(value_);
}

bool PropertyValue::as_flag() const {
  if (!is_flag()) throw Error(ErrorCode::ReducerTypeMismatch, "property is not a flag");
  return std::get<bool>(value_);
}

std::string PropertyValue::to_string() const {
  if (is_number()) return format_number(std::get<double>(value_));
  if (is_flag()) return std::get<bool>(value_) ? "true" : "false";
  return std::get<std::string>(value_);
}

std::string_view to_string(EdgeKind kind) noexcept {
  switch (kind) {
    case EdgeKind::AcLine: return "AcLine";
    case EdgeKind::Transformer: return "Transformer";
    case EdgeKind::Converter: return "Converter";
    case EdgeKind::DcLink: return "DcLink";
    case EdgeKind::Generic: return "Generic";
  }
  return "Generic";
}

std::optional<EdgeKind> parse_edge_kind(std::string_view text) noexcept {
  for (EdgeKind kind : kAllEdgeKinds) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

std::optional<double> electrical_field(const Electrical& e, std::string_view name) {
  if (name == "r") return e.r;
  if (name == "x") return e.x;
  if (name == "s_nom") return e.s_nom;
  if (name == "p_nom") return e.p_nom;
  return std::nullopt;
}

void set_electrical_field(Electrical& e, std::string_view name, std::optional<double> value) {
  if (name == "r") e.r = value;
  else if (name == "x") e.x = value;
  else if (name == "s_nom") e.s_nom = value;
  else if (name == "p_nom") e.p_nom = value;
  else throw Error(ErrorCode::UnknownProperty, "not an electrical field: " + std::string(name));
}

bool is_electrical_field(std::string_view name) noexcept {
  return std::find(std::begin(kElectricalFieldNames), std::end(kElectricalFieldNames), name) !=
         std::end(kElectricalFieldNames);
}

std::optional<NodeIndex> Network::find_node(std::string_view id) const {
  auto it = node_lookup_.find(std::string(id));
  if (it == node_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<EdgeIndex> Network::find_edge(std::string_view id) const {
  auto it = edge_lookup_.find(std::string(id));
  if (it == edge_lookup_.end()) return std::nullopt;
  return it->second;
}

NodeIndex Network::node_index(std::string_view id) const {
  if (auto i = find_node(id)) return *i;
  throw Error(ErrorCode::UnknownNodeId, "unknown node id '" + std::string(id) + "'");
}

EdgeIndex Network::edge_index(std::string_view id) const {
  if (auto i = find_edge(id)) return *i;
  throw Error(ErrorCode::UnknownEdgeId, "unknown edge id '" + std::string(id) + "'");
}

bool Network::has_non_generic_edges() const noexcept {
  return std::any_of(edges_.begin(), edges_.end(),
                     [](const Edge& e) { return e.kind != EdgeKind::Generic; });
}

Network build_network(std::vector<Node> nodes, std::vector<Edge> edges, Validation level) {
  Network net;
  net.node_lookup_.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    if (n.id.empty()) throw Error(ErrorCode::InvalidAttribute, "node id must be nonempty");
    if (!net.node_lookup_.emplace(n.id, i).second) {
      throw Error(ErrorCode::DuplicateNodeId, "duplicate node id '" + n.id + "'");
    }
    if (n.coords) {
      const auto [lon, lat] = *n.coords;
      if (!(lon >= -180.0 && lon <= 180.0 && lat >= -90.0 && lat <= 90.0)) {
        throw Error(ErrorCode::InvalidCoordinate, "node '" + n.id + "' has coordinates out of range");
      }
    }
    if (n.voltage_level && !(*n.voltage_level > 0.0 && std::isfinite(*n.voltage_level))) {
      throw Error(ErrorCode::InvalidAttribute, "node '" + n.id + "' voltage level must be positive");
    }
  }

  net.edge_lookup_.reserve(edges.size());
  net.endpoints_.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (e.id.empty()) throw Error(ErrorCode::InvalidAttribute, "edge id must be nonempty");
    if (!net.edge_lookup_.emplace(e.id, i).second) {
      throw Error(ErrorCode::DuplicateEdgeId, "duplicate edge id '" + e.id + "'");
    }
    auto u = net.node_lookup_.find(e.u);
    if (u == net.node_lookup_.end()) {
      throw Error(ErrorCode::EdgeEndpointMissing, "edge '" + e.id + "' references missing node '" + e.u + "'");
    }
    auto v = net.node_lookup_.find(e.v);
    if (v == net.node_lookup_.end()) {
      throw Error(ErrorCode::EdgeEndpointMissing, "edge '" + e.id + "' references missing node '" + e.v + "'");
    }
    if (e.u == e.v) throw Error(ErrorCode::SelfLoop, "edge '" + e.id + "' is a self-loop");

    const Electrical& el = e.electrical;
    for (auto field : {el.r, el.x, el.s_nom, el.p_nom}) {
      if (field && !std::isfinite(*field)) {
        throw Error(ErrorCode::InvalidAttribute, "edge '" + e.id + "' has a non-finite electrical value");
      }
    }
    if (el.x && *el.x <= 0.0) {
      throw Error(ErrorCode::NonPositiveReactance, "edge '" + e.id + "' has non-positive reactance");
    }
    if (level == Validation::Full && is_ac(e.kind) && !el.x) {
      throw Error(ErrorCode::NonPositiveReactance, "AC edge '" + e.id + "' has no reactance");
    }
    if ((el.s_nom && *el.s_nom < 0.0) || (el.p_nom && *el.p_nom < 0.0)) {
      throw Error(ErrorCode::InvalidAttribute, "edge '" + e.id + "' has negative capacity");
    }
    net.endpoints_.emplace_back(u->second, v->second);
  }

  net.nodes_ = std::move(nodes);
  net.edges_ = std::move(edges);
  return net;
}

std::vector<std::vector<NodeIndex>> connected_components(const Network& net,
                                                         const std::vector<EdgeKind>& kinds) {
  DisjointSet ds(net.node_count());
  for (EdgeIndex e = 0; e < net.edge_count(); ++e) {
    if (std::find(kinds.begin(), kinds.end(), net.edge(e).kind) == kinds.end()) continue;
    auto [u, v] = net.endpoints(e);
    ds.unite(u, v);
  }
  // Roots are the smallest member, so scanning in index order yields
  // components sorted by smallest member with sorted members.
  std::vector<std::vector<NodeIndex>> components;
  std::vector<std::size_t> slot(net.node_count(), SIZE_MAX);
  for (NodeIndex i = 0; i < net.node_count(); ++i) {
    std::size_t root = ds.find(i);
    if (slot[root] == SIZE_MAX) {
      slot[root] = components.size();
      components.emplace_back();
    }
    components[slot[root]].push_back(i);
  }
  return components;
}

std::vector<std::vector<std::string>> connected_component_ids(const Network& net,
                                                              const std::vector<EdgeKind>& kinds) {
  std::vector<std::vector<std::string>> out;
  for (const auto& comp : connected_components(net, kinds)) {
    auto& ids = out.emplace_back();
    for (NodeIndex i : comp) ids.push_back(net.node(i).id);
  }
  return out;
}

Network induced_subnetwork(const Network& net, const std::vector<std::string>& keep) {
  std::vector<bool> kept(net.node_count(), false);
  for (const auto& id : keep) kept[net.node_index(id)] = true;

  std::vector<Node> nodes;
  for (NodeIndex i = 0; i < net.node_count(); ++i) {
    if (kept[i]) nodes.push_back(net.node(i));
  }
  std::vector<Edge> edges;
  for (EdgeIndex e = 0; e < net.edge_count(); ++e) {
    auto [u, v] = net.endpoints(e);
    if (kept[u] && kept[v]) edges.push_back(net.edge(e));
  }
  Network sub = build_network(std::move(nodes), std::move(edges), Validation::Topology);
  sub.metadata = net.metadata;
  return sub;
}

bool structurally_equal(const Network& a, const Network& b, double rel_tol) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count()) return false;
  for (NodeIndex i = 0; i < a.node_count(); ++i) {
    const Node& x = a.node(i);
    const Node& y = b.node(i);
    if (x.id != y.id) return false;
    if (x.coords.has_value() != y.coords.has_value()) return false;
    if (x.coords && (!close(x.coords->lon, y.coords->lon, rel_tol) ||
                     !close(x.coords->lat, y.coords->lat, rel_tol))) {
      return false;
    }
    if (!close(x.voltage_level, y.voltage_level, rel_tol)) return false;
    if (!close(x.properties, y.properties, rel_tol)) return false;
  }
  for (const Edge& x : a.edges()) {
    auto j = b.find_edge(x.id);
    if (!j) return false;
    const Edge& y = b.edge(*j);
    if (x.kind != y.kind) return false;
    if (x.u != y.u || x.v != y.v) return false;
    for (auto name : kElectricalFieldNames) {
      if (!close(electrical_field(x.electrical, name), electrical_field(y.electrical, name), rel_tol)) {
        return false;
      }
    }
    if (!close(x.properties, y.properties, rel_tol)) return false;
  }
  return true;
}

}  // namespace netreduce
