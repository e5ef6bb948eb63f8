#pragma once

#include <filesystem>
#include <string>

#include "netreduce/aggregate.hpp"
#include "netreduce/graph.hpp"
#include "netreduce/partition.hpp"

namespace netreduce {

/// "#rrggbb" for a cluster: golden-angle hue, fixed saturation and value.
std::string cluster_color(int cluster);

/// RFC 7946 FeatureCollection: Points for nodes, then LineStrings for edges,
/// both in network order. Throws MissingCoordinates when a node has none.
std::string geojson(const Network& net, const PartitionResult* p = nullptr, const Membership* m = nullptr);
void export_geojson(const Network& net, const PartitionResult* p, const Membership* m,
                    const std::filesystem::path& path);

/// Undirected DOT graph; nodes carry a cluster attribute when `p` is given.
std::string dot(const Network& net, const PartitionResult* p = nullptr);
void export_dot(const Network& net, const PartitionResult* p, const std::filesystem::path& path);

/// Picks GeoJSON or DOT from the file extension (.geojson/.json or .dot/.gv).
void export_visualization(const Network& net, const PartitionResult* p, const Membership* m,
                          const std::filesystem::path& path);

}  // namespace netreduce
