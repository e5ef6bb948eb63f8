#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "expect_error.hpp"
#include "netreduce/distance.hpp"
#include "netreduce/preprocess.hpp"
#include "support.hpp"

using namespace netreduce;

namespace {

Node at(std::string id, double lon, double lat) {
  Node n;
  n.id = std::move(id);
  n.coords = Coordinates{lon, lat};
  n.voltage_level = 380;
  return n;
}

Edge line(std::string id, std::string u, std::string v, double x) {
  Edge e;
  e.id = std::move(id);
  e.u = std::move(u);
  e.v = std::move(v);
  e.kind = EdgeKind::AcLine;
  e.electrical.x = x;
  return e;
}

Network triangle() {
  return build_network({at("a", 0, 0), at("b", 1, 0), at("c", 0, 1)},
                       {line("ab", "a", "b", 0.1), line("bc", "b", "c", 0.1), line("ca", "c", "a", 0.1)});
}

std::vector<std::string> ids(const Network& net) {
  std::vector<std::string> out;
  for (const Node& n : net.nodes()) out.push_back(n.id);
  return out;
}

}  // namespace

TEST(Haversine, MeridianDegreeAndAntipode) {
  const double r = kEarthRadiusKm;
  EXPECT_NEAR(haversine_km({0, 0}, {0, 1}), r * std::numbers::pi / 180.0, 1e-9);
  EXPECT_NEAR(haversine_km({0, 0}, {180, 0}), r * std::numbers::pi, 1e-6);
  EXPECT_NEAR(haversine_km({10, 50}, {10, 50}), 0.0, 1e-12);
  // Quarter circle between the equator and a pole.
  EXPECT_NEAR(haversine_km({37, 0}, {-120, 90}), r * std::numbers::pi / 2, 1e-6);
}

TEST(GeoDistance, SymmetricZeroDiagonal) {
  support::Rng rng(1);
  Network net = support::random_grid(rng, {});
  DistanceMatrix d = geo_distance_matrix(net);
  EXPECT_NO_THROW(d.validate());
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(d(i, i), 0.0);
    for (std::size_t j = 0; j < d.size(); ++j) EXPECT_EQ(d(i, j), d(j, i));
  }
  EXPECT_DOUBLE_EQ(d(0, 1), haversine_km(*net.node(0).coords, *net.node(1).coords));
}

TEST(GeoDistance, MissingCoordinates) {
  Node n;
  n.id = "x";
  Network net = build_network({at("a", 0, 0), n}, {});
  EXPECT_NR_ERROR(geo_distance_matrix(net), ErrorCode::MissingCoordinates);
  EXPECT_NR_ERROR(feature_matrix(net, DistanceFamily::Geographical), ErrorCode::MissingCoordinates);
}

TEST(Slack, HighestDegreeTiesToSmallestIndex) {
  Network tri = triangle();
  std::vector<NodeIndex> all{0, 1, 2};
  EXPECT_EQ(choose_slack(tri, all), 0u);
  Network star = build_network({at("a", 0, 0), at("b", 1, 0), at("c", 0, 1)},
                               {line("1", "a", "b", 0.1), line("2", "b", "c", 0.1)});
  EXPECT_EQ(choose_slack(star, all), 1u);
}

TEST(Ptdf, EqualReactanceTriangle) {
  Network net = triangle();
  PtdfMatrix p = compute_ptdf(net, ids(net), "a");
  ASSERT_EQ(p.branch_order, (std::vector<std::string>{"ab", "bc", "ca"}));
  // Unit injection at b, withdrawn at a: 2/3 on the direct branch, 1/3 around.
  EXPECT_NEAR(p(0, 1), -2.0 / 3.0, 1e-12);
  EXPECT_NEAR(p(1, 1), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(p(2, 1), -1.0 / 3.0, 1e-12);
  for (std::size_t b = 0; b < 3; ++b) EXPECT_EQ(p(b, 0), 0.0);

  auto dense = support::dense_dc_flows(net, {0, 1, 2}, 1, 0);
  for (std::size_t b = 0; b < 3; ++b) EXPECT_NEAR(p(b, 1), dense[b], 1e-12);
}

TEST(Ptdf, MatchesDenseSolveAndConservesFlow) {
  support::Rng rng(77);
  for (int t = 0; t < 25; ++t) {
    Network net = support::random_ac_network(rng, 2 + t, t);
    std::vector<NodeIndex> all(net.node_count());
    std::iota(all.begin(), all.end(), 0);
    NodeIndex slack = choose_slack(net, all);
    PtdfMatrix p = compute_ptdf(net, ids(net), net.node(slack).id);
    std::vector<std::size_t> branches(net.edge_count());
    std::iota(branches.begin(), branches.end(), 0);
    for (std::size_t i = 0; i < net.node_count(); ++i) {
      auto dense = support::dense_dc_flows(net, branches, i, slack);
      std::vector<double> balance(net.node_count(), 0.0);
      for (std::size_t b = 0; b < branches.size(); ++b) {
        EXPECT_NEAR(p(b, i), dense[b], 1e-9);
        auto [u, v] = net.endpoints(b);
        balance[std::min(u, v)] += p(b, i);
        balance[std::max(u, v)] -= p(b, i);
      }
      for (std::size_t n = 0; n < net.node_count(); ++n) {
        double expected = (n == i ? 1.0 : 0.0) - (n == slack ? 1.0 : 0.0);
        EXPECT_NEAR(balance[n], expected, 1e-8);
      }
    }
  }
}

TEST(Ptdf, Errors) {
  Network net = triangle();
  EXPECT_NR_ERROR(compute_ptdf(net, {"a", "b"}, "a"), ErrorCode::NotAnIsland);
  EXPECT_NR_ERROR(compute_ptdf(net, {"a", "b", "c"}, "zz"), ErrorCode::UnknownNodeId);
  Network split = build_network({at("a", 0, 0), at("b", 1, 0), at("c", 0, 1)}, {line("ab", "a", "b", 0.1)});
  EXPECT_NR_ERROR(compute_ptdf(split, {"a", "b", "c"}, "a"), ErrorCode::SingularSystem);
  EXPECT_NR_ERROR(compute_ptdf(split, {"a", "b"}, "c"), ErrorCode::NotAnIsland);
}

TEST(ElectricalDistance, InfiniteAcrossIslands) {
  support::Rng rng(9);
  support::GridOptions o;
  o.nodes = 12;
  o.islands = 3;
  Network net = support::random_grid(rng, o);
  DistanceMatrix d = electrical_distance_matrix(net);
  GroupLabeling islands = detect_ac_islands(net);
  EXPECT_NO_THROW(d.validate());
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (islands.labels[i] != islands.labels[j]) EXPECT_TRUE(std::isinf(d(i, j)));
      else EXPECT_TRUE(std::isfinite(d(i, j)));
    }
  }
}

TEST(ElectricalDistance, EqualsPtdfColumnNorm) {
  Network net = triangle();
  PtdfMatrix p = compute_ptdf(net, ids(net), "a");
  DistanceMatrix d = electrical_distance_matrix(net);
  double s = 0.0;
  for (std::size_t b = 0; b < 3; ++b) s += (p(b, 1) - p(b, 2)) * (p(b, 1) - p(b, 2));
  EXPECT_NEAR(d(1, 2), std::sqrt(s), 1e-12);
  FeatureMatrix f = feature_matrix(net, DistanceFamily::Electrical);
  EXPECT_EQ(f.dims, 3u);
  EXPECT_NEAR(f.row(1)[0], p(0, 1), 1e-12);
}

TEST(InfinityMask, CrossGroupEntriesOnly) {
  support::Rng rng(2);
  DistanceMatrix d = support::random_distance_matrix(rng, 6);
  GroupLabeling g{d.order(), {0, 1, 0, 1, 2, 0}, GroupKind::VoltageLevel};
  DistanceMatrix m = apply_infinity_mask(d, g);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      if (g.labels[i] == g.labels[j]) EXPECT_EQ(m(i, j), d(i, j));
      else EXPECT_TRUE(std::isinf(m(i, j)));
    }
  }
  GroupLabeling wrong{{"x"}, {0}, GroupKind::Single};
  EXPECT_NR_ERROR(apply_infinity_mask(d, wrong), ErrorCode::DomainMismatch);
}

TEST(FeatureMatrix, GeographicalProjectionApproximatesHaversine) {
  Network net = build_network({at("a", 10.0, 50.0), at("b", 10.1, 50.05)}, {});
  FeatureMatrix f = feature_matrix(net, DistanceFamily::Geographical);
  double dx = f.row(0)[0] - f.row(1)[0], dy = f.row(0)[1] - f.row(1)[1];
  EXPECT_NEAR(std::hypot(dx, dy), haversine_km(*net.node(0).coords, *net.node(1).coords), 0.01);
}

TEST(DistanceCsv, WritesInf) {
  DistanceMatrix d({"a", "b"}, DistanceFamily::Electrical);
  d.set(0, 1, kInfinity);
  auto dir = support::temp_dir("distance_csv");
  write_distance_csv(d, dir / "d.csv");
  EXPECT_NE(support::read_file(dir / "d.csv").find("inf"), std::string::npos);
}
