#pragma once

#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "netreduce/graph.hpp"
#include "netreduce/preprocess.hpp"

namespace netreduce {

inline constexpr double kEarthRadiusKm = 6371.0088;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class DistanceFamily { Geographical, Electrical };

std::string_view to_string(DistanceFamily family) noexcept;
std::optional<DistanceFamily> parse_distance_family(std::string_view text) noexcept;

/// Symmetric, zero-diagonal, nonnegative matrix over `order`. +inf marks
/// pairs that must never share a cluster.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::vector<std::string> order, DistanceFamily family);

  std::size_t size() const noexcept { return order_.size(); }
  const std::vector<std::string>& order() const noexcept { return order_; }
  DistanceFamily family() const noexcept { return family_; }

  double operator()(std::size_t i, std::size_t j) const { return d_[i * order_.size() + j]; }
  /// Sets both (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, double value);

  /// Restriction to the given indices, in the given order.
  DistanceMatrix submatrix(std::span<const std::size_t> indices) const;

  /// Throws InvalidParameter if any invariant is broken.
  void validate() const;

 private:
  std::vector<std::string> order_;
  std::vector<double> d_;
  DistanceFamily family_ = DistanceFamily::Geographical;
};

/// DC sensitivities of one AC island: entry (b, n) is the MW flow on branch
/// b per MW injected at node n and withdrawn at the slack. Branches are
/// oriented from the endpoint earlier in node_order to the later one.
struct PtdfMatrix {
  std::vector<std::string> branch_order;
  std::vector<std::string> node_order;
  std::string slack;
  std::vector<double> m;  // row-major, branches x nodes

  double operator()(std::size_t branch, std::size_t node) const {
    return m[branch * node_order.size() + node];
  }
};

/// Node feature vectors for coordinate-based algorithms.
struct FeatureMatrix {
  std::vector<std::string> order;
  std::size_t dims = 0;
  std::vector<double> rows;  // row-major, order.size() x dims

  std::span<const double> row(std::size_t i) const { return {rows.data() + i * dims, dims}; }
  FeatureMatrix subset(std::span<const std::size_t> indices) const;
};

double haversine_km(const Coordinates& a, const Coordinates& b);

/// Great-circle distances in km. Throws MissingCoordinates.
DistanceMatrix geo_distance_matrix(const Network& net);

/// Highest AC degree in the island, ties to the smallest node index.
NodeIndex choose_slack(const Network& net, std::span<const NodeIndex> island);

PtdfMatrix compute_ptdf(const Network& net, const std::vector<std::string>& island,
                        const std::string& slack);

/// Euclidean distance between PTDF columns inside each AC island; +inf
/// between islands.
DistanceMatrix electrical_distance_matrix(const Network& net);

/// Sets entries between different groups to +inf. Throws DomainMismatch.
DistanceMatrix apply_infinity_mask(const DistanceMatrix& m, const GroupLabeling& g);

/// Geographical: equirectangular km projection around the mean latitude.
/// Electrical: PTDF columns, each island in its own block of the branch axis.
FeatureMatrix feature_matrix(const Network& net, DistanceFamily family);

/// Debug dumps. Header row is the column ids; +inf is written as "inf".
void write_distance_csv(const DistanceMatrix& m, const std::filesystem::path& path);
void write_ptdf_csv(const PtdfMatrix& ptdf, const std::filesystem::path& path);

}  // namespace netreduce
