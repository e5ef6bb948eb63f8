#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "netreduce/clustering.hpp"
#include "netreduce/distance.hpp"
#include "netreduce/graph.hpp"

namespace netreduce::support {

using Rng = std::mt19937_64;

struct GridOptions {
  std::size_t nodes = 20;
  /// AC edges added on top of each island's spanning tree.
  std::size_t extra_edges = 10;
  std::vector<double> voltage_levels = {380.0};
  std::size_t islands = 1;
  /// Duplicates of existing AC edges (same endpoints, new id).
  std::size_t parallel_edges = 0;
  /// Generic edges between random node pairs.
  std::size_t generic_edges = 0;
  bool with_properties = true;
};

/// Power-grid style network: every island is connected through AcLine
/// (same voltage) and Transformer (different voltage) edges, islands are
/// chained through DcLink and Converter edges, coordinates lie in a
/// 10 x 10 degree box over central Europe.
Network random_grid(Rng& rng, const GridOptions& options);

/// Single connected AC island of random reactances.
Network random_ac_network(Rng& rng, std::size_t nodes, std::size_t extra_edges);

/// Generic edges only, coordinates and a mix of numeric, text and flag
/// properties on nodes and edges.
Network random_generic_network(Rng& rng, std::size_t nodes, std::size_t edges);

/// Euclidean distances between random points in the unit square.
DistanceMatrix random_distance_matrix(Rng& rng, std::size_t n, std::size_t dims = 2);
/// Points behind random_distance_matrix, row-major.
std::vector<std::vector<double>> random_points(Rng& rng, std::size_t n, std::size_t dims);
DistanceMatrix euclidean_matrix(const std::vector<std::vector<double>>& points);
FeatureMatrix features_of(const std::vector<std::vector<double>>& points);

/// Oracles below are written from the textbook definitions and share no
/// code with the library.

/// Dense DC power flow: solves B_red theta = p by Gaussian elimination and
/// returns the branch flows (theta_u - theta_v) / x for a unit injection at
/// `inject` withdrawn at `slack`. Branch orientation follows the library:
/// lower node index to higher.
std::vector<double> dense_dc_flows(const Network& net, const std::vector<std::size_t>& branches,
                                   std::size_t inject, std::size_t slack);

/// Minimum of sum_i min_m d(i, m) over all k-subsets of medoids.
double brute_force_kmedoids_cost(const DistanceMatrix& d, int k);

/// DBSCAN from its definition: core points connected through eps chains
/// form clusters numbered by smallest core index; a border point joins the
/// adjacent cluster with the smallest number; noise becomes singletons
/// appended in index order.
Labels naive_dbscan(const DistanceMatrix& d, double eps, int min_pts);

/// Single linkage via Kruskal: drop the k-1 heaviest MST edges.
Labels mst_cut(const DistanceMatrix& d, int k);

/// Agglomeration that recomputes every cluster distance from scratch:
/// complete = max, average = mean of pairwise distances, ward = increase
/// of the error sum of squares computed from the points themselves.
Labels naive_agglomerative(const std::vector<std::vector<double>>& points, int k, Linkage linkage);

/// Runs a distance-matrix algorithm ("kmedoids", "dbscan" or
/// "agglomerative-<linkage>") once on `d` masked by `groups`, then once per
/// group on the group's submatrix with the cluster count the masked run
/// realized there. True when both give the same partition.
bool masking_equivalent(const DistanceMatrix& d, const std::vector<int>& groups, const std::string& algorithm,
                        int k, double eps, int min_pts);

/// Clusters of `assignment` that mix voltage levels (when `voltage`) or
/// span AC islands (when `islands`). Islands are recomputed here from the
/// AcLine and Transformer edges.
std::size_t awareness_violations(const Network& net, const std::vector<int>& assignment, bool voltage,
                                 bool islands);

/// True when the two labelings induce the same partition.
bool same_partition(const std::vector<int>& a, const std::vector<int>& b);

/// TOML [input] through [aggregation] sections for a random strategy over
/// the power-grid CSV directory `input_dir` holding `nodes` nodes. No
/// [output] section.
std::string random_pipeline_toml(Rng& rng, const std::filesystem::path& input_dir, std::size_t nodes);

/// [output] section writing every artifact below `out_dir`.
std::string output_toml(const std::filesystem::path& out_dir);

/// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& name);

std::string read_file(const std::filesystem::path& path);

/// Relative path -> content for every regular file below `dir`, skipping
/// names that end in `skip_suffix` when it is non-empty.
std::map<std::string, std::string> snapshot(const std::filesystem::path& dir, const std::string& skip_suffix = "");

}  // namespace netreduce::support
