#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>

#include "netreduce/graph.hpp"
#include "netreduce/registry.hpp"

namespace netreduce {

/// Names a registered loader plus its string parameters (paths, options).
struct LoaderSpec {
  std::string name;
  std::map<std::string, std::string> params;
};

using LoaderFn = std::function<Network(const LoaderSpec&)>;

/// Generic schema: nodes.csv (id, optional x=lon, y=lat, v_nom) and
/// edges.csv (id, from, to). Unrecognized columns become properties.
Network load_generic_csv(const std::filesystem::path& nodes_path,
                         const std::filesystem::path& edges_path);

/// Power-grid schema rooted at `dir`: buses.csv is mandatory; lines.csv,
/// transformers.csv, converters.csv, links.csv and edges.csv (generic edges)
/// are read when present.
Network load_power_grid_csv(const std::filesystem::path& dir);

/// Writes the power-grid schema when any edge is not Generic, otherwise the
/// generic schema. Files of either schema not written this time are removed
/// so a reload sees exactly this network.
void export_csv(const Network& net, const std::filesystem::path& dir);

/// Built-ins: "csv-generic" (params nodes, edges) and "csv-power-grid"
/// (param dir).
Registry<LoaderFn>& loader_registry();
void register_loader(const std::string& name, LoaderFn loader);
Network load(const LoaderSpec& spec);

/// Cell parsing rule for property columns: number, then true/false flag,
/// then text. Empty cells mean "absent".
std::optional<PropertyValue> parse_property_cell(std::string_view cell);

}  // namespace netreduce
