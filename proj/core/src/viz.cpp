#include "netreduce/viz.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include <json.hpp>

#include "netreduce/error.hpp"

namespace netreduce {

namespace {

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::string dot_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string cluster_color(int cluster) {
  const double hue = std::fmod(static_cast<double>(cluster) * 137.508, 360.0);
  const double s = 0.65, v = 0.9;
  const double c = v * s;
  const double hp = hue / 60.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp) % 6) {
    case 0: r = c, g = x; break;
    case 1: r = x, g = c; break;
    case 2: g = c, b = x; break;
    case 3: g = x, b = c; break;
    case 4: r = x, b = c; break;
    default: r = c, b = x; break;
  }
  const double m = v - c;
  auto channel = [&](double f) { return static_cast<int>(std::lround((f + m) * 255.0)); };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", channel(r), channel(g), channel(b));
  return buf;
}

std::string geojson(const Network& net, const PartitionResult* p, const Membership* m) {
  using json = nlohmann::ordered_json;
  for (const Node& n : net.nodes()) {
    if (!n.coords) throw Error(ErrorCode::MissingCoordinates, "node '" + n.id + "' has no coordinates");
  }
  std::map<std::string, std::size_t> node_members, edge_members;
  if (m) {
    for (const auto& [id, members] : m->node_members) node_members[id] = members.size();
    for (const auto& [id, members] : m->edge_members) edge_members[id] = members.size();
  }

  json features = json::array();
  for (const Node& n : net.nodes()) {
    json props{{"id", n.id}};
    if (p) {
      int c = p->cluster_of(n.id);
      props["cluster"] = c;
      props["color"] = cluster_color(c);
    }
    props["voltage_level"] = n.voltage_level ? json(*n.voltage_level) : json(nullptr);
    if (auto it = node_members.find(n.id); it != node_members.end()) props["member_count"] = it->second;
    features.push_back(json{
        {"type", "Feature"},
        {"geometry", {{"type", "Point"}, {"coordinates", {n.coords->lon, n.coords->lat}}}},
        {"properties", props},
    });
  }
  for (EdgeIndex e = 0; e < net.edge_count(); ++e) {
    const Edge& edge = net.edge(e);
    auto [u, v] = net.endpoints(e);
    const Coordinates& a = *net.node(u).coords;
    const Coordinates& b = *net.node(v).coords;
    json props{{"id", edge.id}, {"kind", std::string(to_string(edge.kind))}};
    if (auto it = edge_members.find(edge.id); it != edge_members.end()) props["member_count"] = it->second;
    features.push_back(json{
        {"type", "Feature"},
        {"geometry", {{"type", "LineString"}, {"coordinates", {{a.lon, a.lat}, {b.lon, b.lat}}}}},
        {"properties", props},
    });
  }
  json doc{{"type", "FeatureCollection"}, {"features", features}};
  return doc.dump(1) + "\n";
}

void export_geojson(const Network& net, const PartitionResult* p, const Membership* m,
                    const std::filesystem::path& path) {
  write_text(geojson(net, p, m), path);
}

std::string dot(const Network& net, const PartitionResult* p) {
  std::string out = "graph network {\n";
  for (const Node& n : net.nodes()) {
    out += "  " + dot_string(n.id);
    if (p) {
      int c = p->cluster_of(n.id);
      out += " [cluster=" + std::to_string(c) + ", color=" + dot_string(cluster_color(c)) + "]";
    }
    out += ";\n";
  }
  for (const Edge& e : net.edges()) {
    out += "  " + dot_string(e.u) + " -- " + dot_string(e.v) + " [id=" + dot_string(e.id) +
           ", kind=" + dot_string(to_string(e.kind)) + "];\n";
  }
  out += "}\n";
  return out;
}

void export_dot(const Network& net, const PartitionResult* p, const std::filesystem::path& path) {
  write_text(dot(net, p), path);
}

void export_visualization(const Network& net, const PartitionResult* p, const Membership* m,
                          const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".dot" || ext == ".gv") {
    export_dot(net, p, path);
  } else if (ext == ".geojson" || ext == ".json") {
    export_geojson(net, p, m, path);
  } else {
    throw Error(ErrorCode::ConfigError, "unsupported visualization format '" + ext + "'");
  }
}

}  // namespace netreduce
