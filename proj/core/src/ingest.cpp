#include "netreduce/ingest.hpp"

#include <algorithm>
#include <set>

#include "netreduce/csv.hpp"
#include "netreduce/error.hpp"

namespace netreduce {

namespace fs = std::filesystem;

namespace {

constexpr const char* kPowerGridFiles[] = {"buses.csv", "lines.csv", "transformers.csv",
                                           "converters.csv", "links.csv", "edges.csv"};
constexpr const char* kGenericFiles[] = {"nodes.csv", "edges.csv"};

struct EdgeFile {
  const char* file;
  EdgeKind kind;
  bool requires_x;
};

constexpr EdgeFile kEdgeFiles[] = {
    {"lines.csv", EdgeKind::AcLine, true},
    {"transformers.csv", EdgeKind::Transformer, true},
    {"converters.csv", EdgeKind::Converter, false},
    {"links.csv", EdgeKind::DcLink, false},
    {"edges.csv", EdgeKind::Generic, false},
};

std::optional<double> number_cell(const std::string& cell, std::string_view column,
                                  std::string_view file, std::size_t row) {
  if (cell.empty()) return std::nullopt;
  auto v = csv::parse_number(cell);
  if (!v) {
    throw Error(ErrorCode::MalformedInput, std::string(file) + " row " + std::to_string(row + 2) +
                                               ": column '" + std::string(column) +
                                               "' is not a number: '" + cell + "'");
  }
  return v;
}

std::optional<Coordinates> coords_cells(const csv::Table& t, std::size_t r,
                                        std::optional<std::size_t> xcol,
                                        std::optional<std::size_t> ycol, std::string_view file) {
  const auto& row = t.rows[r];
  auto lon = xcol ? number_cell(row[*xcol], "x", file, r) : std::nullopt;
  auto lat = ycol ? number_cell(row[*ycol], "y", file, r) : std::nullopt;
  if (lon.has_value() != lat.has_value()) {
    throw Error(ErrorCode::MalformedInput,
                std::string(file) + " row " + std::to_string(r + 2) + ": x and y must both be set or both empty");
  }
  if (!lon) return std::nullopt;
  return Coordinates{*lon, *lat};
}

/// Columns not consumed by the schema become properties.
Properties extra_properties(const csv::Table& t, std::size_t r, const std::vector<bool>& consumed) {
  Properties props;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (consumed[c]) continue;
    if (auto v = parse_property_cell(t.rows[r][c])) props.emplace(t.header[c], std::move(*v));
  }
  return props;
}

std::vector<Node> read_nodes(const csv::Table& t, std::string_view file, bool power_grid) {
  std::vector<bool> consumed(t.header.size(), false);
  auto take = [&](std::string_view name, bool required) -> std::optional<std::size_t> {
    auto c = required ? std::optional(t.require(name, file)) : t.column(name);
    if (c) consumed[*c] = true;
    return c;
  };
  std::size_t id = *take("id", true);
  auto v_nom = take("v_nom", power_grid);
  auto x = take("x", power_grid);
  auto y = take("y", power_grid);

  std::vector<Node> nodes;
  nodes.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Node n;
    n.id = t.rows[r][id];
    n.coords = coords_cells(t, r, x, y, file);
    if (v_nom) n.voltage_level = number_cell(t.rows[r][*v_nom], "v_nom", file, r);
    n.properties = extra_properties(t, r, consumed);
    nodes.push_back(std::move(n));
  }
  return nodes;
}

void read_edges(const csv::Table& t, std::string_view file, EdgeKind kind, bool requires_x,
                const char* from_col, const char* to_col, std::vector<Edge>& out) {
  std::vector<bool> consumed(t.header.size(), false);
  auto take = [&](std::string_view name, bool required) -> std::optional<std::size_t> {
    auto c = required ? std::optional(t.require(name, file)) : t.column(name);
    if (c) consumed[*c] = true;
    return c;
  };
  std::size_t id = *take("id", true);
  std::size_t from = *take(from_col, true);
  std::size_t to = *take(to_col, true);
  std::optional<std::size_t> fields[4];
  for (std::size_t f = 0; f < 4; ++f) {
    auto name = kElectricalFieldNames[f];
    fields[f] = take(name, requires_x && name == "x");
  }

  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    Edge e;
    e.id = row[id];
    e.u = row[from];
    e.v = row[to];
    e.kind = kind;
    for (std::size_t f = 0; f < 4; ++f) {
      if (fields[f]) {
        set_electrical_field(e.electrical, kElectricalFieldNames[f],
                             number_cell(row[*fields[f]], kElectricalFieldNames[f], file, r));
      }
    }
    e.properties = extra_properties(t, r, consumed);
    out.push_back(std::move(e));
  }
}

std::set<std::string> property_names(const auto& items) {
  std::set<std::string> names;
  for (const auto& item : items) {
    for (const auto& [name, _] : item.properties) names.insert(name);
  }
  return names;
}

void check_no_collision(const std::set<std::string>& props, const std::vector<std::string>& fixed,
                        std::string_view file) {
  for (const auto& f : fixed) {
    if (props.contains(f)) {
      throw Error(ErrorCode::InvalidAttribute, "property '" + f + "' collides with a " +
                                                   std::string(file) + " schema column");
    }
  }
}

std::string opt_cell(const std::optional<double>& v) {
  return v ? PropertyValue(*v).to_string() : std::string();
}

void append_property_cells(std::vector<std::string>& row, const Properties& props,
                           const std::set<std::string>& names) {
  for (const auto& name : names) {
    auto it = props.find(name);
    row.push_back(it == props.end() ? std::string() : it->second.to_string());
  }
}

csv::Table nodes_table(const Network& net, bool power_grid) {
  bool any_coords = std::any_of(net.nodes().begin(), net.nodes().end(), [](const Node& n) { return n.coords.has_value(); });
  bool any_voltage = std::any_of(net.nodes().begin(), net.nodes().end(), [](const Node& n) { return n.voltage_level.has_value(); });
  bool with_coords = power_grid || any_coords;
  bool with_voltage = power_grid || any_voltage;

  csv::Table t;
  t.header = {"id"};
  if (with_voltage) t.header.push_back("v_nom");
  if (with_coords) {
    t.header.push_back("x");
    t.header.push_back("y");
  }
  auto names = property_names(net.nodes());
  check_no_collision(names, {"id", "v_nom", "x", "y"}, power_grid ? "buses.csv" : "nodes.csv");
  t.header.insert(t.header.end(), names.begin(), names.end());

  for (const Node& n : net.nodes()) {
    std::vector<std::string> row{n.id};
    if (with_voltage) row.push_back(opt_cell(n.voltage_level));
    if (with_coords) {
      row.push_back(n.coords ? PropertyValue(n.coords->lon).to_string() : "");
      row.push_back(n.coords ? PropertyValue(n.coords->lat).to_string() : "");
    }
    append_property_cells(row, n.properties, names);
    t.rows.push_back(std::move(row));
  }
  return t;
}

csv::Table edges_table(const std::vector<const Edge*>& edges, bool requires_x, const char* from_col,
                       const char* to_col, std::string_view file) {
  csv::Table t;
  t.header = {"id", from_col, to_col};
  std::vector<std::string_view> fields;
  for (auto name : kElectricalFieldNames) {
    bool present = (requires_x && name == "x") ||
                   std::any_of(edges.begin(), edges.end(), [&](const Edge* e) {
                     return electrical_field(e->electrical, name).has_value();
                   });
    if (present) {
      fields.push_back(name);
      t.header.emplace_back(name);
    }
  }
  std::set<std::string> names;
  for (const Edge* e : edges) {
    for (const auto& [name, _] : e->properties) names.insert(name);
  }
  check_no_collision(names, {"id", from_col, to_col, "r", "x", "s_nom", "p_nom"}, file);
  t.header.insert(t.header.end(), names.begin(), names.end());

  for (const Edge* e : edges) {
    std::vector<std::string> row{e->id, e->u, e->v};
    for (auto name : fields) row.push_back(opt_cell(electrical_field(e->electrical, name)));
    append_property_cells(row, e->properties, names);
    t.rows.push_back(std::move(row));
  }
  return t;
}

void remove_stale(const fs::path& dir, const std::set<std::string>& written) {
  std::set<std::string> known(std::begin(kPowerGridFiles), std::end(kPowerGridFiles));
  known.insert(std::begin(kGenericFiles), std::end(kGenericFiles));
  for (const auto& f : known) {
    if (written.contains(f)) continue;
    std::error_code ec;
    fs::remove(dir / f, ec);
  }
}

}  // namespace

std::optional<PropertyValue> parse_property_cell(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (auto v = csv::parse_number(cell)) return PropertyValue(*v);
  if (cell == "true") return PropertyValue(true);
  if (cell == "false") return PropertyValue(false);
  return PropertyValue(std::string(cell));
}

Network load_generic_csv(const fs::path& nodes_path, const fs::path& edges_path) {
  auto node_table = csv::read_file(nodes_path);
  auto nodes = read_nodes(node_table, nodes_path.filename().string(), false);
  std::vector<Edge> edges;
  auto edge_table = csv::read_file(edges_path);
  read_edges(edge_table, edges_path.filename().string(), EdgeKind::Generic, false, "from", "to", edges);
  return build_network(std::move(nodes), std::move(edges));
}

Network load_power_grid_csv(const fs::path& dir) {
  auto buses = csv::read_file(dir / "buses.csv");
  auto nodes = read_nodes(buses, "buses.csv", true);
  std::vector<Edge> edges;
  for (const auto& ef : kEdgeFiles) {
    fs::path p = dir / ef.file;
    if (!fs::exists(p)) continue;
    read_edges(csv::read_file(p), ef.file, ef.kind, ef.requires_x, "bus0", "bus1", edges);
  }
  return build_network(std::move(nodes), std::move(edges));
}

void export_csv(const Network& net, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, "cannot create directory " + dir.string());

  std::set<std::string> written;
  if (net.has_non_generic_edges()) {
    csv::write_file(dir / "buses.csv", nodes_table(net, true));
    written.insert("buses.csv");
    for (const auto& ef : kEdgeFiles) {
      std::vector<const Edge*> subset;
      for (const Edge& e : net.edges()) {
        if (e.kind == ef.kind) subset.push_back(&e);
      }
      if (subset.empty()) continue;
      csv::write_file(dir / ef.file, edges_table(subset, ef.requires_x, "bus0", "bus1", ef.file));
      written.insert(ef.file);
    }
  } else {
    csv::write_file(dir / "nodes.csv", nodes_table(net, false));
    std::vector<const Edge*> all;
    for (const Edge& e : net.edges()) all.push_back(&e);
    csv::write_file(dir / "edges.csv", edges_table(all, false, "from", "to", "edges.csv"));
    written = {"nodes.csv", "edges.csv"};
  }
  remove_stale(dir, written);
}

Registry<LoaderFn>& loader_registry() {
  static Registry<LoaderFn> registry("loader");
  static const bool seeded = [](Registry<LoaderFn>& r) {
    r.add("csv-generic", [](const LoaderSpec& spec) {
      auto param = [&](const char* key) {
        auto it = spec.params.find(key);
        if (it == spec.params.end()) {
          throw Error(ErrorCode::ConfigError, std::string("csv-generic loader requires parameter '") + key + "'");
        }
        return fs::path(it->second);
      };
      return load_generic_csv(param("nodes"), param("edges"));
    });
    r.add("csv-power-grid", [](const LoaderSpec& spec) {
      auto it = spec.params.find("dir");
      if (it == spec.params.end()) {
        throw Error(ErrorCode::ConfigError, "csv-power-grid loader requires parameter 'dir'");
      }
      return load_power_grid_csv(it->second);
    });
    return true;
  }(registry);
  (void)seeded;
  return registry;
}

void register_loader(const std::string& name, LoaderFn loader) {
  loader_registry().add(name, std::move(loader));
}

Network load(const LoaderSpec& spec) { return loader_registry().get(spec.name)(spec); }

}  // namespace netreduce
