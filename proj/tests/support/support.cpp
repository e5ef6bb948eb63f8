#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <sstream>

#include <unistd.h>

namespace netreduce::support {

namespace {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

Labels labels_from_roots(UnionFind& uf, std::size_t n) {
  std::map<std::size_t, int> index;
  Labels out(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, _] = index.try_emplace(uf.find(i), static_cast<int>(index.size()));
    out[i] = it->second;
  }
  return out;
}

Edge ac_edge(Rng& rng, const std::string& id, const Node& a, const Node& b, bool with_properties) {
  Edge e;
  e.id = id;
  e.u = a.id;
  e.v = b.id;
  e.kind = a.voltage_level == b.voltage_level ? EdgeKind::AcLine : EdgeKind::Transformer;
  e.electrical.x = uniform(rng, 0.01, 0.5);
  if (with_properties) {
    e.electrical.r = *e.electrical.x * uniform(rng, 0.05, 0.2);
    e.electrical.s_nom = std::round(uniform(rng, 100.0, 2000.0));
    if (e.kind == EdgeKind::AcLine) e.properties.insert_or_assign("length", std::round(uniform(rng, 1.0, 100.0) * 10.0) / 10.0);
  }
  return e;
}

}  // namespace

Network random_grid(Rng& rng, const GridOptions& options) {
  const std::size_t n = options.nodes;
  const std::size_t islands = std::max<std::size_t>(1, std::min(options.islands, n));
  std::vector<Node> nodes(n);
  std::vector<std::vector<std::size_t>> members(islands);
  for (std::size_t i = 0; i < n; ++i) {
    Node& node = nodes[i];
    node.id = "n" + std::to_string(i);
    node.coords = Coordinates{uniform(rng, 5.0, 15.0), uniform(rng, 45.0, 55.0)};
    node.voltage_level = options.voltage_levels[pick(rng, options.voltage_levels.size())];
    if (options.with_properties) {
      if (pick(rng, 5) != 0) node.properties.insert_or_assign("load", std::round(uniform(rng, 0.0, 100.0) * 100.0) / 100.0);
      node.properties.insert_or_assign("carrier", std::string("AC"));
    }
    members[i % islands].push_back(i);
  }

  std::vector<Edge> edges;
  auto next_id = [&] { return "e" + std::to_string(edges.size()); };
  for (const auto& island : members) {
    for (std::size_t j = 1; j < island.size(); ++j) {
      const Node& a = nodes[island[pick(rng, j)]];
      const Node& b = nodes[island[j]];
      edges.push_back(ac_edge(rng, next_id(), a, b, options.with_properties));
    }
  }
  for (std::size_t added = 0, attempts = 0; added < options.extra_edges && attempts < 100 * (options.extra_edges + 1);
       ++attempts) {
    const auto& island = members[pick(rng, islands)];
    if (island.size() < 2) continue;
    std::size_t a = island[pick(rng, island.size())], b = island[pick(rng, island.size())];
    if (a == b) continue;
    edges.push_back(ac_edge(rng, next_id(), nodes[a], nodes[b], options.with_properties));
    ++added;
  }
  const std::size_t ac_count = edges.size();
  for (std::size_t i = 0; i < options.parallel_edges && ac_count > 0; ++i) {
    Edge copy = edges[pick(rng, ac_count)];
    copy.id = next_id();
    copy.electrical.x = uniform(rng, 0.01, 0.5);
    if (copy.electrical.r) copy.electrical.r = *copy.electrical.x * 0.1;
    edges.push_back(std::move(copy));
  }
  for (std::size_t g = 0; g + 1 < islands; ++g) {
    Edge e;
    e.id = next_id();
    e.u = nodes[members[g][pick(rng, members[g].size())]].id;
    e.v = nodes[members[g + 1][pick(rng, members[g + 1].size())]].id;
    e.kind = g % 2 == 0 ? EdgeKind::DcLink : EdgeKind::Converter;
    if (options.with_properties) e.electrical.p_nom = std::round(uniform(rng, 100.0, 1000.0));
    edges.push_back(std::move(e));
  }
  for (std::size_t i = 0; i < options.generic_edges && n > 1; ++i) {
    std::size_t a = pick(rng, n), b = pick(rng, n);
    if (a == b) continue;
    Edge e;
    e.id = next_id();
    e.u = nodes[a].id;
    e.v = nodes[b].id;
    edges.push_back(std::move(e));
  }
  return build_network(std::move(nodes), std::move(edges));
}

Network random_ac_network(Rng& rng, std::size_t n, std::size_t extra_edges) {
  GridOptions options;
  options.nodes = n;
  options.extra_edges = extra_edges;
  options.with_properties = false;
  return random_grid(rng, options);
}

Network random_generic_network(Rng& rng, std::size_t n, std::size_t m) {
  static const char* kWords[] = {"alpha", "beta", "gamma", "delta, with comma", "quote \"q\""};
  std::vector<Node> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    Node& node = nodes[i];
    node.id = "v" + std::to_string(i);
    if (pick(rng, 4) != 0) {
      node.coords = Coordinates{uniform(rng, -180.0, 180.0), uniform(rng, -90.0, 90.0)};
    }
    if (pick(rng, 3) == 0) node.voltage_level = std::vector<double>{110.0, 220.0, 380.0}[pick(rng, 3)];
    if (pick(rng, 2) == 0) node.properties.insert_or_assign("weight", uniform(rng, -1e6, 1e6));
    if (pick(rng, 2) == 0) node.properties.insert_or_assign("label", std::string(kWords[pick(rng, std::size(kWords))]));
    if (pick(rng, 3) == 0) node.properties.insert_or_assign("active", pick(rng, 2) == 0);
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < m && n > 1; ++i) {
    std::size_t a = pick(rng, n), b = pick(rng, n);
    if (a == b) continue;
    Edge e;
    e.id = "w" + std::to_string(edges.size());
    e.u = nodes[a].id;
    e.v = nodes[b].id;
    if (pick(rng, 2) == 0) e.electrical.x = uniform(rng, 0.001, 1.0);
    if (pick(rng, 2) == 0) e.electrical.r = uniform(rng, 0.0, 1.0);
    if (pick(rng, 2) == 0) e.electrical.s_nom = uniform(rng, 0.0, 5000.0);
    if (pick(rng, 2) == 0) e.properties.insert_or_assign("capacity", uniform(rng, 0.0, 1e3));
    if (pick(rng, 3) == 0) e.properties.insert_or_assign("note", std::string(kWords[pick(rng, std::size(kWords))]));
    edges.push_back(std::move(e));
  }
  return build_network(std::move(nodes), std::move(edges));
}

std::vector<std::vector<double>> random_points(Rng& rng, std::size_t n, std::size_t dims) {
  std::vector<std::vector<double>> points(n, std::vector<double>(dims));
  for (auto& p : points) {
    for (auto& x : p) x = uniform(rng, 0.0, 1.0);
  }
  return points;
}

DistanceMatrix euclidean_matrix(const std::vector<std::vector<double>>& points) {
  std::vector<std::string> order;
  for (std::size_t i = 0; i < points.size(); ++i) order.push_back("p" + std::to_string(i));
  DistanceMatrix d(order, DistanceFamily::Geographical);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < points[i].size(); ++k) s += (points[i][k] - points[j][k]) * (points[i][k] - points[j][k]);
      d.set(i, j, std::sqrt(s));
    }
  }
  return d;
}

DistanceMatrix random_distance_matrix(Rng& rng, std::size_t n, std::size_t dims) {
  return euclidean_matrix(random_points(rng, n, dims));
}

FeatureMatrix features_of(const std::vector<std::vector<double>>& points) {
  FeatureMatrix f;
  f.dims = points.empty() ? 0 : points[0].size();
  for (std::size_t i = 0; i < points.size(); ++i) {
    f.order.push_back("p" + std::to_string(i));
    f.rows.insert(f.rows.end(), points[i].begin(), points[i].end());
  }
  return f;
}

std::vector<double> dense_dc_flows(const Network& net, const std::vector<std::size_t>& branches,
                                   std::size_t inject, std::size_t slack) {
  const std::size_t n = net.node_count();
  std::vector<std::vector<double>> b(n, std::vector<double>(n, 0.0));
  for (std::size_t e : branches) {
    auto [u, v] = net.endpoints(e);
    double y = 1.0 / *net.edge(e).electrical.x;
    b[u][u] += y;
    b[v][v] += y;
    b[u][v] -= y;
    b[v][u] -= y;
  }
  // Reduced system without the slack row and column.
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != slack) keep.push_back(i);
  }
  const std::size_t m = keep.size();
  std::vector<std::vector<double>> a(m, std::vector<double>(m + 1, 0.0));
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < m; ++c) a[r][c] = b[keep[r]][keep[c]];
    a[r][m] = keep[r] == inject ? 1.0 : 0.0;
  }
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < m; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col) continue;
      double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= m; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<double> theta(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) theta[keep[r]] = a[r][m] / a[r][r];

  std::vector<double> flows;
  for (std::size_t e : branches) {
    auto [u, v] = net.endpoints(e);
    std::size_t from = std::min(u, v), to = std::max(u, v);
    flows.push_back((theta[from] - theta[to]) / *net.edge(e).electrical.x);
  }
  return flows;
}

double brute_force_kmedoids_cost(const DistanceMatrix& d, int k) {
  const std::size_t n = d.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> chosen(n, false);
  std::fill(chosen.begin(), chosen.begin() + k, true);
  // prev_permutation walks every k-subset of an n-set exactly once.
  do {
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t m = 0; m < n; ++m) {
        if (chosen[m]) nearest = std::min(nearest, d(i, m));
      }
      cost += nearest;
    }
    best = std::min(best, cost);
  } while (std::prev_permutation(chosen.begin(), chosen.end()));
  return best;
}

Labels naive_dbscan(const DistanceMatrix& d, double eps, int min_pts) {
  const std::size_t n = d.size();
  std::vector<bool> core(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    int count = 0;
    for (std::size_t j = 0; j < n; ++j) count += d(i, j) <= eps ? 1 : 0;
    core[i] = count >= min_pts;
  }
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (core[i] && core[j] && d(i, j) <= eps) uf.unite(i, j);
    }
  }
  std::map<std::size_t, int> cluster_of_root;
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) cluster_of_root.try_emplace(uf.find(i), static_cast<int>(cluster_of_root.size()));
  }
  const int clusters = static_cast<int>(cluster_of_root.size());
  Labels out(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) {
      out[i] = cluster_of_root[uf.find(i)];
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (core[j] && d(i, j) <= eps) {
        int c = cluster_of_root[uf.find(j)];
        out[i] = out[i] < 0 ? c : std::min(out[i], c);
      }
    }
  }
  int next = clusters;
  for (std::size_t i = 0; i < n; ++i) {
    if (out[i] < 0) out[i] = next++;
  }
  return out;
}

Labels mst_cut(const DistanceMatrix& d, int k) {
  const std::size_t n = d.size();
  struct WeightedPair {
    double w;
    std::size_t a, b;
  };
  std::vector<WeightedPair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.push_back({d(i, j), i, j});
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) { return x.w < y.w; });
  UnionFind uf(n);
  std::vector<WeightedPair> tree;
  for (const auto& p : pairs) {
    if (uf.unite(p.a, p.b)) tree.push_back(p);
  }
  // Keep all but the k-1 heaviest tree edges.
  UnionFind cut(n);
  for (std::size_t t = 0; t + (k - 1) < tree.size(); ++t) cut.unite(tree[t].a, tree[t].b);
  return labels_from_roots(cut, n);
}

Labels naive_agglomerative(const std::vector<std::vector<double>>& points, int k, Linkage linkage) {
  const std::size_t n = points.size();
  auto dist = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t t = 0; t < points[i].size(); ++t) s += (points[i][t] - points[j][t]) * (points[i][t] - points[j][t]);
    return std::sqrt(s);
  };
  auto cluster_distance = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    switch (linkage) {
      case Linkage::Single: {
        double best = std::numeric_limits<double>::infinity();
        for (auto i : a)
          for (auto j : b) best = std::min(best, dist(i, j));
        return best;
      }
      case Linkage::Complete: {
        double worst = 0.0;
        for (auto i : a)
          for (auto j : b) worst = std::max(worst, dist(i, j));
        return worst;
      }
      case Linkage::Average: {
        double s = 0.0;
        for (auto i : a)
          for (auto j : b) s += dist(i, j);
        return s / static_cast<double>(a.size() * b.size());
      }
      case Linkage::Ward: {
        const std::size_t dims = points[0].size();
        std::vector<double> ca(dims, 0.0), cb(dims, 0.0);
        for (auto i : a)
          for (std::size_t t = 0; t < dims; ++t) ca[t] += points[i][t] / static_cast<double>(a.size());
        for (auto j : b)
          for (std::size_t t = 0; t < dims; ++t) cb[t] += points[j][t] / static_cast<double>(b.size());
        double sq = 0.0;
        for (std::size_t t = 0; t < dims; ++t) sq += (ca[t] - cb[t]) * (ca[t] - cb[t]);
        const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
        return na * nb / (na + nb) * sq;
      }
    }
    return 0.0;
  };

  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < n; ++i) clusters.push_back({i});
  while (clusters.size() > static_cast<std::size_t>(k)) {
    std::size_t ba = 0, bb = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        double v = cluster_distance(clusters[a], clusters[b]);
        if (v < best) {
          best = v;
          ba = a;
          bb = b;
        }
      }
    }
    clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bb));
  }
  Labels out(n);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (auto i : clusters[c]) out[i] = static_cast<int>(c);
  }
  return out;
}

bool masking_equivalent(const DistanceMatrix& d, const std::vector<int>& groups, const std::string& algorithm,
                        int k, double eps, int min_pts) {
  const std::size_t n = d.size();
  DistanceMatrix masked = d;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (groups[i] != groups[j]) masked.set(i, j, kInfinity);

  auto run = [&](const DistanceMatrix& m, int clusters) -> Labels {
    if (algorithm == "kmedoids") return kmedoids(m, clusters, 0, 100000).labels;
    if (algorithm == "dbscan") return dbscan(m, eps, min_pts).labels;
    for (Linkage l : {Linkage::Single, Linkage::Complete, Linkage::Average, Linkage::Ward}) {
      if (algorithm == "agglomerative-" + std::string(to_string(l))) return agglomerative(m, clusters, l);
    }
    throw std::invalid_argument("not a distance-matrix algorithm: " + algorithm);
  };

  const Labels whole = run(masked, k);
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < n; ++i) members[groups[i]].push_back(i);
  Labels combined(n);
  int offset = 0;
  for (const auto& [g, idx] : members) {
    std::set<int> realized;
    for (auto i : idx) realized.insert(whole[i]);
    Labels part = run(d.submatrix(idx), static_cast<int>(realized.size()));
    int top = 0;
    for (std::size_t t = 0; t < idx.size(); ++t) {
      combined[idx[t]] = offset + part[t];
      top = std::max(top, part[t]);
    }
    offset += top + 1;
  }
  return same_partition(whole, combined);
}

std::size_t awareness_violations(const Network& net, const std::vector<int>& assignment, bool voltage,
                                 bool islands) {
  UnionFind uf(net.node_count());
  for (std::size_t e = 0; e < net.edge_count(); ++e) {
    EdgeKind k = net.edge(e).kind;
    if (k == EdgeKind::AcLine || k == EdgeKind::Transformer) uf.unite(net.endpoints(e).first, net.endpoints(e).second);
  }
  std::map<int, std::set<std::optional<double>>> levels;
  std::map<int, std::set<std::size_t>> roots;
  for (std::size_t i = 0; i < net.node_count(); ++i) {
    levels[assignment[i]].insert(net.node(i).voltage_level);
    roots[assignment[i]].insert(uf.find(i));
  }
  std::size_t bad = 0;
  for (const auto& [c, l] : levels) {
    if ((voltage && l.size() > 1) || (islands && roots[c].size() > 1)) ++bad;
  }
  return bad;
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [x, new_x] = ab.try_emplace(a[i], b[i]);
    auto [y, new_y] = ba.try_emplace(b[i], a[i]);
    if (x->second != b[i] || y->second != a[i]) return false;
  }
  return true;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("netreduce_" + std::to_string(::getpid()) + "_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace netreduce::support

namespace netreduce::support {

std::map<std::string, std::string> snapshot(const std::filesystem::path& dir, const std::string& skip_suffix) {
  std::map<std::string, std::string> out;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string rel = std::filesystem::relative(entry.path(), dir).generic_string();
    if (!skip_suffix.empty() && rel.ends_with(skip_suffix)) continue;
    out[rel] = read_file(entry.path());
  }
  return out;
}

}  // namespace netreduce::support

namespace netreduce::support {

std::string random_pipeline_toml(Rng& rng, const std::filesystem::path& input_dir, std::size_t nodes) {
  static const char* kAlgorithms[] = {"kmeans",
                                      "kmedoids",
                                      "dbscan",
                                      "agglomerative-single",
                                      "agglomerative-complete",
                                      "agglomerative-average",
                                      "agglomerative-ward"};
  const std::string algorithm = kAlgorithms[pick(rng, std::size(kAlgorithms))];
  const bool electrical = pick(rng, 2) == 0;
  std::ostringstream t;
  t << "[input]\nloader = \"csv-power-grid\"\ndir = \"" << input_dir.generic_string() << "\"\n\n";
  t << "[preprocess]\nconsolidate_parallel = " << (pick(rng, 2) == 0 ? "true" : "false") << "\n\n";
  t << "[partition]\nalgorithm = \"" << algorithm << "\"\n";
  t << "family = \"" << (electrical ? "electrical" : "geographical") << "\"\n";
  t << "voltage_aware = " << (pick(rng, 2) == 0 ? "true" : "false") << "\n";
  t << "seed = " << pick(rng, 1000) << "\n";
  // Enough clusters for every voltage level and island group.
  t << "k = " << std::max<std::size_t>(nodes / 2, std::min<std::size_t>(nodes, 12)) << "\n";
  t << "eps = " << (electrical ? 0.3 : 80.0) << "\nmin_pts = 2\n\n";
  t << "[aggregation]\nprofile = \"" << (pick(rng, 2) == 0 ? "power-grid" : "generic") << "\"\n";
  if (pick(rng, 2) == 0) {
    t << "\n[[aggregation.transforms]]\nname = \"set_property\"\ntarget = \"agg_0\"\nproperty = \"note\"\n"
         "value = \"edited\"\n";
  }
  return t.str();
}

std::string output_toml(const std::filesystem::path& out_dir) {
  const std::string d = out_dir.generic_string();
  return "\n[output]\nbusmap = \"" + d + "/busmap.csv\"\nnetwork_dir = \"" + d + "/network\"\nmembership = \"" + d +
         "/membership.json\"\nviz = \"" + d + "/map.geojson\"\n";
}

}  // namespace netreduce::support
