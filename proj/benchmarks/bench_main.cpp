#include <benchmark/benchmark.h>

#include <numeric>

#include "netreduce/clustering.hpp"
#include "netreduce/distance.hpp"
#include "netreduce/partition.hpp"
#include "netreduce/pipeline.hpp"
#include "support.hpp"

using namespace netreduce;

namespace {

Network grid(std::size_t nodes, std::size_t edges) {
  support::Rng rng(42);
  support::GridOptions o;
  o.nodes = nodes;
  o.voltage_levels = {220, 380};
  o.extra_edges = edges - (nodes - 1);
  return support::random_grid(rng, o);
}

void BM_Ptdf(benchmark::State& state) {
  support::Rng rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  Network net = support::random_ac_network(rng, n, n);
  std::vector<std::string> ids;
  for (const Node& node : net.nodes()) ids.push_back(node.id);
  std::vector<NodeIndex> all(n);
  std::iota(all.begin(), all.end(), 0);
  const std::string slack = net.node(choose_slack(net, all)).id;
  for (auto _ : state) benchmark::DoNotOptimize(compute_ptdf(net, ids, slack));
}
BENCHMARK(BM_Ptdf)->Arg(100)->Arg(400)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_KMeans(benchmark::State& state) {
  support::Rng rng(2);
  auto points = support::random_points(rng, static_cast<std::size_t>(state.range(0)), 2);
  FeatureMatrix f = support::features_of(points);
  for (auto _ : state) benchmark::DoNotOptimize(kmeans(f, 100, 7, 300));
}
BENCHMARK(BM_KMeans)->Arg(1000)->Arg(6800)->Unit(benchmark::kMillisecond);

void BM_PartitionAndAggregate(benchmark::State& state) {
  Network net = grid(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  PipelineConfig config;
  config.partition.algorithm = "kmeans";
  config.partition.family = DistanceFamily::Geographical;
  config.partition.voltage_aware = true;
  config.partition.k = 100;
  config.profile = "power-grid";
  for (auto _ : state) {
    PartitionResult p = partition(net, config.partition);
    benchmark::DoNotOptimize(aggregate(net, p, config));
  }
}
BENCHMARK(BM_PartitionAndAggregate)->Args({1000, 2500})->Args({6800, 17500})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
