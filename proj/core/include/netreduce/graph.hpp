#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace netreduce {

/// A scalar attribute value. Numbers are always finite.
class PropertyValue {
 public:
  using Storage = std::variant<double, std::string, bool>;

  PropertyValue(double number);  // throws InvalidAttribute on NaN/inf
  PropertyValue(int number) : PropertyValue(static_cast<double>(number)) {}
  PropertyValue(std::string text) : value_(std::move(text)) {}
  PropertyValue(const char* text) : value_(std::string(text)) {}
  PropertyValue(bool flag) : value_(flag) {}

  bool is_number() const noexcept { return std::holds_alternative<double>(value_); }
  bool is_text() const noexcept { return std::holds_alternative<std::string>(value_); }
  bool is_flag() const noexcept { return std::holds_alternative<bool>(value_); }

  double as_number() const;
  const std::string& as_text() const;
  bool as_flag() const;

  /// Text rendering used for CSV cells and labels. Numbers use the shortest
  /// representation that round-trips.
  std::string to_string() const;

  const Storage& storage() const noexcept { return value_; }

  friend bool operator==(const PropertyValue&, const PropertyValue&) = default;

 private:
  Storage value_;
};

using Properties = std::map<std::string, PropertyValue>;

struct Coordinates {
  double lon = 0.0;  // degrees
  double lat = 0.0;  // degrees
  friend bool operator==(const Coordinates&, const Coordinates&) = default;
};

struct Node {
  std::string id;
  std::optional<Coordinates> coords;
  std::optional<double> voltage_level;  // kV
  Properties properties;
};

enum class EdgeKind { AcLine, Transformer, Converter, DcLink, Generic };

inline constexpr EdgeKind kAllEdgeKinds[] = {EdgeKind::AcLine, EdgeKind::Transformer,
                                             EdgeKind::Converter, EdgeKind::DcLink,
                                             EdgeKind::Generic};

std::string_view to_string(EdgeKind kind) noexcept;
std::optional<EdgeKind> parse_edge_kind(std::string_view text) noexcept;

/// True for the kinds that carry AC power flow (lines and transformers).
constexpr bool is_ac(EdgeKind kind) noexcept {
  return kind == EdgeKind::AcLine || kind == EdgeKind::Transformer;
}

/// Branch electrical parameters. Every field is optional; AC branches must
/// carry a positive reactance.
struct Electrical {
  std::optional<double> r;      // p.u.
  std::optional<double> x;      // p.u.
  std::optional<double> s_nom;  // MVA
  std::optional<double> p_nom;  // MW

  bool empty() const noexcept { return !r && !x && !s_nom && !p_nom; }
  friend bool operator==(const Electrical&, const Electrical&) = default;
};

/// Names under which electrical fields take part in property rules.
inline constexpr std::string_view kElectricalFieldNames[] = {"r", "x", "s_nom", "p_nom"};

std::optional<double> electrical_field(const Electrical& e, std::string_view name);
void set_electrical_field(Electrical& e, std::string_view name, std::optional<double> value);
bool is_electrical_field(std::string_view name) noexcept;

struct Edge {
  std::string id;
  std::string u;
  std::string v;
  EdgeKind kind = EdgeKind::Generic;
  Electrical electrical;
  Properties properties;
};

using NodeIndex = std::size_t;
using EdgeIndex = std::size_t;

enum class Validation {
  Full,      // every invariant, including reactance on AC branches
  Topology,  // structural invariants only; used for aggregation skeletons
};

/// Immutable attributed multigraph. Nodes and edges keep insertion order.
class Network {
 public:
  Network() = default;

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const Node& node(NodeIndex i) const { return nodes_.at(i); }
  const Edge& edge(EdgeIndex i) const { return edges_.at(i); }

  std::optional<NodeIndex> find_node(std::string_view id) const;
  std::optional<EdgeIndex> find_edge(std::string_view id) const;
  NodeIndex node_index(std::string_view id) const;  // throws UnknownNodeId
  EdgeIndex edge_index(std::string_view id) const;  // throws UnknownEdgeId

  /// Endpoint indices of edge i, in stored (u, v) order.
  std::pair<NodeIndex, NodeIndex> endpoints(EdgeIndex i) const { return endpoints_.at(i); }

  bool has_non_generic_edges() const noexcept;

  std::map<std::string, std::string> metadata;

 private:
  friend Network build_network(std::vector<Node>, std::vector<Edge>, Validation);

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::pair<NodeIndex, NodeIndex>> endpoints_;
  std::unordered_map<std::string, NodeIndex> node_lookup_;
  std::unordered_map<std::string, EdgeIndex> edge_lookup_;
};

/// Validates and assembles a network, preserving input order.
Network build_network(std::vector<Node> nodes, std::vector<Edge> edges,
                      Validation level = Validation::Full);

/// Components over edges whose kind is in `kinds`, as sorted node-index
/// lists. Components are ordered by their smallest member index.
std::vector<std::vector<NodeIndex>> connected_components(const Network& net,
                                                         const std::vector<EdgeKind>& kinds);

/// Same as connected_components but returned as node id lists.
std::vector<std::vector<std::string>> connected_component_ids(const Network& net,
                                                              const std::vector<EdgeKind>& kinds);

Network induced_subnetwork(const Network& net, const std::vector<std::string>& keep);

/// Node sequence, node attributes and the edge set (keyed by id) agree.
/// Numbers compare to `rel_tol` relative error. Edge order is not compared
/// because CSV export groups edges by kind.
bool structurally_equal(const Network& a, const Network& b, double rel_tol = 1e-12);

}  // namespace netreduce
