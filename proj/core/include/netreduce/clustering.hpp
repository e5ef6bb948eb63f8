#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "netreduce/distance.hpp"

namespace netreduce {

/// Cluster label per point, 0-based. Labels are not necessarily ordered;
/// the partition manager re-indexes them.
using Labels = std::vector<int>;

struct KMeansResult {
  Labels labels;
  std::vector<double> wcss_history;  // one entry per Lloyd iteration
  int iterations = 0;
};

/// Lloyd iterations from k-means++ seeding. Empty clusters take the point
/// farthest from its centroid (among clusters with more than one point).
KMeansResult kmeans(const FeatureMatrix& features, int k, std::uint64_t seed, int max_iter);

/// Within-cluster sum of squared distances to the cluster means.
double within_cluster_ss(const FeatureMatrix& features, const Labels& labels);

struct KMedoidsResult {
  Labels labels;
  std::vector<std::size_t> medoids;  // point indices, ascending
  double build_cost = 0.0;
  double cost = 0.0;
  std::vector<double> cost_history;  // after BUILD, then after each swap
};

/// PAM. BUILD first places the 1-medoid of every infinity-separated block,
/// then adds medoids greedily by largest cost reduction. SWAP applies the
/// best improving (medoid, non-medoid) exchange within a block until none
/// improves or `max_iter` swaps were made. The seed is accepted for
/// interface symmetry; PAM is deterministic.
KMedoidsResult kmedoids(const DistanceMatrix& d, int k, std::uint64_t seed, int max_iter);

/// Sum over points of the distance to the nearest medoid.
double medoid_cost(const DistanceMatrix& d, const std::vector<std::size_t>& medoids);

struct DbscanResult {
  Labels labels;                   // density clusters first, then noise singletons
  std::vector<std::size_t> noise;  // point indices, ascending
  int density_clusters = 0;
};

/// Density clustering over a precomputed matrix. The eps-neighborhood is
/// inclusive and contains the point itself.
DbscanResult dbscan(const DistanceMatrix& d, double eps, int min_pts);

enum class Linkage { Single, Complete, Average, Ward };

std::string_view to_string(Linkage linkage) noexcept;

/// Lance-Williams agglomeration down to k clusters. Ties merge the pair whose
/// smallest member indices are lexicographically smallest. Ward works on
/// squared input distances.
Labels agglomerative(const DistanceMatrix& d, int k, Linkage linkage);

/// Labels of the blocks that +inf entries separate: points i, j share a
/// block when a path of finite entries joins them. Blocks are numbered by
/// smallest member.
std::vector<int> finite_blocks(const DistanceMatrix& d);

/// Largest-remainder apportionment of k over groups proportional to size,
/// with at least one and at most size_g clusters per group.
std::vector<int> allocate_cluster_budget(const std::vector<int>& group_sizes, int k);

}  // namespace netreduce
