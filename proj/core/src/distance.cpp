#include "netreduce/distance.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "netreduce/csv.hpp"
#include "netreduce/error.hpp"

namespace netreduce {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

const Coordinates& require_coords(const Node& n) {
  if (!n.coords) {
    throw Error(ErrorCode::MissingCoordinates, "node '" + n.id + "' has no coordinates");
  }
  return *n.coords;
}

struct IslandSystem {
  std::vector<NodeIndex> nodes;             // ascending network index
  std::vector<EdgeIndex> branches;          // network edge order
  std::vector<std::pair<std::size_t, std::size_t>> ends;  // local (from, to), from < to
  std::size_t slack = 0;                    // local index
};

IslandSystem collect_island(const Network& net, std::vector<NodeIndex> nodes, NodeIndex slack) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  std::vector<std::size_t> local(net.node_count(), SIZE_MAX);
  for (std::size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = i;
  if (local[slack] == SIZE_MAX) {
    throw Error(ErrorCode::NotAnIsland, "slack '" + net.node(slack).id + "' is not in the island");
  }

  IslandSystem sys;
  sys.nodes = std::move(nodes);
  sys.slack = local[slack];
  for (EdgeIndex e = 0; e < net.edge_count(); ++e) {
    if (!is_ac(net.edge(e).kind)) continue;
    auto [u, v] = net.endpoints(e);
    bool in_u = local[u] != SIZE_MAX;
    bool in_v = local[v] != SIZE_MAX;
    if (in_u != in_v) {
      throw Error(ErrorCode::NotAnIsland,
                  "AC branch '" + net.edge(e).id + "' leaves the island; it is not a maximal AC component");
    }
    if (!in_u) continue;
    if (!net.edge(e).electrical.x) {
      throw Error(ErrorCode::NonPositiveReactance, "AC branch '" + net.edge(e).id + "' has no reactance");
    }
    sys.branches.push_back(e);
    sys.ends.emplace_back(std::min(local[u], local[v]), std::max(local[u], local[v]));
  }

  // Connectivity over the island branches.
  std::vector<std::size_t> parent(sys.nodes.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = sys.nodes.size();
  for (auto [a, b] : sys.ends) {
    auto ra = find(a), rb = find(b);
    if (ra != rb) {
      parent[rb] = ra;
      --components;
    }
  }
  if (components > 1) {
    throw Error(ErrorCode::SingularSystem, "island is not AC-connected; the reduced susceptance matrix is singular");
  }
  return sys;
}

/// Branch x node PTDF for one island as a dense matrix (slack column zero).
Eigen::MatrixXd island_ptdf(const Network& net, const IslandSystem& sys) {
  const std::size_t n = sys.nodes.size();
  const std::size_t m = sys.branches.size();
  Eigen::MatrixXd ptdf = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  if (n <= 1 || m == 0) return ptdf;

  // Reduced index: skip the slack.
  auto red = [&](std::size_t i) -> Eigen::Index {
    return static_cast<Eigen::Index>(i < sys.slack ? i : i - 1);
  };
  const auto nr = static_cast<Eigen::Index>(n - 1);
  Eigen::MatrixXd b_red = Eigen::MatrixXd::Zero(nr, nr);
  Eigen::MatrixXd weighted_incidence = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), nr);
  for (std::size_t k = 0; k < m; ++k) {
    const double b = 1.0 / *net.edge(sys.branches[k]).electrical.x;
    auto [from, to] = sys.ends[k];
    const auto kk = static_cast<Eigen::Index>(k);
    if (from != sys.slack) {
      b_red(red(from), red(from)) += b;
      weighted_incidence(kk, red(from)) = b;
    }
    if (to != sys.slack) {
      b_red(red(to), red(to)) += b;
      weighted_incidence(kk, red(to)) = -b;
    }
    if (from != sys.slack && to != sys.slack) {
      b_red(red(from), red(to)) -= b;
      b_red(red(to), red(from)) -= b;
    }
  }

  Eigen::LLT<Eigen::MatrixXd> llt(b_red);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularSystem, "reduced susceptance matrix is not positive definite");
  }
  // ptdf_red = diag(b) A_red B_red^-1; B_red is symmetric so solve B_red Y = (diag(b) A_red)^T.
  Eigen::MatrixXd reduced = llt.solve(weighted_incidence.transpose()).transpose();
  for (std::size_t i = 0; i < n; ++i) {
    if (i == sys.slack) continue;
    ptdf.col(static_cast<Eigen::Index>(i)) = reduced.col(red(i));
  }
  return ptdf;
}

}  // namespace

std::string_view to_string(DistanceFamily family) noexcept {
  return family == DistanceFamily::Geographical ? "geographical" : "electrical";
}

std::optional<DistanceFamily> parse_distance_family(std::string_view text) noexcept {
  if (text == "geographical") return DistanceFamily::Geographical;
  if (text == "electrical") return DistanceFamily::Electrical;
  return std::nullopt;
}

DistanceMatrix::DistanceMatrix(std::vector<std::string> order, DistanceFamily family)
    : order_(std::move(order)), d_(order_.size() * order_.size(), 0.0), family_(family) {}

void DistanceMatrix::set(std::size_t i, std::size_t j, double value) {
  d_[i * order_.size() + j] = value;
  d_[j * order_.size() + i] = value;
}

DistanceMatrix DistanceMatrix::submatrix(std::span<const std::size_t> indices) const {
  std::vector<std::string> ids;
  ids.reserve(indices.size());
  for (auto i : indices) ids.push_back(order_.at(i));
  DistanceMatrix sub(std::move(ids), family_);
  for (std::size_t a = 0; a < indices.size(); ++a) {
    for (std::size_t b = a + 1; b < indices.size(); ++b) sub.set(a, b, (*this)(indices[a], indices[b]));
  }
  return sub;
}

void DistanceMatrix::validate() const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    if ((*this)(i, i) != 0.0) throw Error(ErrorCode::InvalidParameter, "distance diagonal must be zero");
    for (std::size_t j = i + 1; j < n; ++j) {
      double a = (*this)(i, j);
      if (std::isnan(a) || a < 0.0) {
        throw Error(ErrorCode::InvalidParameter, "distances must be nonnegative and not NaN");
      }
      if (a != (*this)(j, i)) throw Error(ErrorCode::InvalidParameter, "distance matrix must be symmetric");
    }
  }
}

FeatureMatrix FeatureMatrix::subset(std::span<const std::size_t> indices) const {
  FeatureMatrix out;
  out.dims = dims;
  out.order.reserve(indices.size());
  out.rows.reserve(indices.size() * dims);
  for (auto i : indices) {
    out.order.push_back(order.at(i));
    auto r = row(i);
    out.rows.insert(out.rows.end(), r.begin(), r.end());
  }
  return out;
}

double haversine_km(const Coordinates& a, const Coordinates& b) {
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double dphi = (b.lat - a.lat) * kDegToRad;
  const double dlambda = (b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

DistanceMatrix geo_distance_matrix(const Network& net) {
  std::vector<std::string> ids;
  std::vector<Coordinates> coords;
  for (const Node& n : net.nodes()) {
    coords.push_back(require_coords(n));
    ids.push_back(n.id);
  }
  DistanceMatrix d(std::move(ids), DistanceFamily::Geographical);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    for (std::size_t j = i + 1; j < coords.size(); ++j) d.set(i, j, haversine_km(coords[i], coords[j]));
  }
  return d;
}

NodeIndex choose_slack(const Network& net, std::span<const NodeIndex> island) {
  std::vector<std::size_t> degree(net.node_count(), 0);
  for (EdgeIndex e = 0; e < net.edge_count(); ++e) {
    if (!is_ac(net.edge(e).kind)) continue;
    auto [u, v] = net.endpoints(e);
    ++degree[u];
    ++degree[v];
  }
  NodeIndex best = island.front();
  for (NodeIndex i : island) {
    if (degree[i] > degree[best] || (degree[i] == degree[best] && i < best)) best = i;
  }
  return best;
}

PtdfMatrix compute_ptdf(const Network& net, const std::vector<std::string>& island,
                        const std::string& slack) {
  if (island.empty()) throw Error(ErrorCode::NotAnIsland, "island is empty");
  std::vector<NodeIndex> nodes;
  nodes.reserve(island.size());
  for (const auto& id : island) nodes.push_back(net.node_index(id));
  auto sys = collect_island(net, std::move(nodes), net.node_index(slack));
  Eigen::MatrixXd ptdf = island_ptdf(net, sys);

  PtdfMatrix out;
  out.slack = slack;
  for (NodeIndex i : sys.nodes) out.node_order.push_back(net.node(i).id);
  for (EdgeIndex e : sys.branches) out.branch_order.push_back(net.edge(e).id);
  out.m.resize(sys.branches.size() * sys.nodes.size());
  for (std::size_t b = 0; b < sys.branches.size(); ++b) {
    for (std::size_t j = 0; j < sys.nodes.size(); ++j) {
      out.m[b * sys.nodes.size() + j] = ptdf(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

DistanceMatrix electrical_distance_matrix(const Network& net) {
  std::vector<std::string> ids;
  for (const Node& n : net.nodes()) ids.push_back(n.id);
  DistanceMatrix d(std::move(ids), DistanceFamily::Electrical);
  for (std::size_t i = 0; i < net.node_count(); ++i) {
    for (std::size_t j = i + 1; j < net.node_count(); ++j) d.set(i, j, kInfinity);
  }

  for (const auto& island : connected_components(net, {EdgeKind::AcLine, EdgeKind::Transformer})) {
    auto sys = collect_island(net, island, choose_slack(net, island));
    Eigen::MatrixXd ptdf = island_ptdf(net, sys);
    for (std::size_t a = 0; a < sys.nodes.size(); ++a) {
      for (std::size_t b = a + 1; b < sys.nodes.size(); ++b) {
        double dist = (ptdf.col(static_cast<Eigen::Index>(a)) - ptdf.col(static_cast<Eigen::Index>(b))).norm();
        d.set(sys.nodes[a], sys.nodes[b], dist);
      }
    }
  }
  return d;
}

DistanceMatrix apply_infinity_mask(const DistanceMatrix& m, const GroupLabeling& g) {
  if (g.node_ids != m.order()) {
    throw Error(ErrorCode::DomainMismatch, "group labeling and distance matrix cover different nodes");
  }
  DistanceMatrix out = m;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      if (g.labels[i] != g.labels[j]) out.set(i, j, kInfinity);
    }
  }
  return out;
}

FeatureMatrix feature_matrix(const Network& net, DistanceFamily family) {
  FeatureMatrix f;
  for (const Node& n : net.nodes()) f.order.push_back(n.id);
  const std::size_t n = net.node_count();

  if (family == DistanceFamily::Geographical) {
    double mean_lat = 0.0;
    for (const Node& node : net.nodes()) mean_lat += require_coords(node).lat;
    if (n > 0) mean_lat /= static_cast<double>(n);
    const double scale_x = kEarthRadiusKm * std::cos(mean_lat * kDegToRad) * kDegToRad;
    const double scale_y = kEarthRadiusKm * kDegToRad;
    f.dims = 2;
    f.rows.reserve(2 * n);
    for (const Node& node : net.nodes()) {
      f.rows.push_back(scale_x * node.coords->lon);
      f.rows.push_back(scale_y * node.coords->lat);
    }
    return f;
  }

  struct Block {
    IslandSystem sys;
    Eigen::MatrixXd ptdf;
    std::size_t offset;
  };
  std::vector<Block> blocks;
  std::size_t total_branches = 0;
  for (const auto& island : connected_components(net, {EdgeKind::AcLine, EdgeKind::Transformer})) {
    auto sys = collect_island(net, island, choose_slack(net, island));
    auto ptdf = island_ptdf(net, sys);
    std::size_t width = sys.branches.size();
    blocks.push_back({std::move(sys), std::move(ptdf), total_branches});
    total_branches += width;
  }
  f.dims = total_branches;
  f.rows.assign(n * total_branches, 0.0);
  for (const auto& block : blocks) {
    for (std::size_t a = 0; a < block.sys.nodes.size(); ++a) {
      double* row = f.rows.data() + block.sys.nodes[a] * total_branches + block.offset;
      for (std::size_t b = 0; b < block.sys.branches.size(); ++b) {
        row[b] = block.ptdf(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a));
      }
    }
  }
  return f;
}

void write_distance_csv(const DistanceMatrix& m, const std::filesystem::path& path) {
  csv::Table t;
  t.header = {""};
  t.header.insert(t.header.end(), m.order().begin(), m.order().end());
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::vector<std::string> row{m.order()[i]};
    for (std::size_t j = 0; j < m.size(); ++j) {
      double v = m(i, j);
      row.push_back(std::isinf(v) ? "inf" : PropertyValue(v).to_string());
    }
    t.rows.push_back(std::move(row));
  }
  csv::write_file(path, t);
}

void write_ptdf_csv(const PtdfMatrix& ptdf, const std::filesystem::path& path) {
  csv::Table t;
  t.header = {""};
  t.header.insert(t.header.end(), ptdf.node_order.begin(), ptdf.node_order.end());
  for (std::size_t b = 0; b < ptdf.branch_order.size(); ++b) {
    std::vector<std::string> row{ptdf.branch_order[b]};
    for (std::size_t j = 0; j < ptdf.node_order.size(); ++j) row.push_back(PropertyValue(ptdf(b, j)).to_string());
    t.rows.push_back(std::move(row));
  }
  csv::write_file(path, t);
}

}  // namespace netreduce
