#include "cli.hpp"

#include <algorithm>
#include <exception>
#include <ostream>

#include <CLI11.hpp>

#include "netreduce/pipeline.hpp"
#include "netreduce/viz.hpp"

namespace netreduce {

namespace {

std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

PartitionResult load_busmap(const Network& net, const std::string& path) {
  return in_stage("busmap", [&] { return read_busmap(net, path); });
}

int cmd_validate(const std::string& config_path, std::ostream& out) {
  PipelineConfig config = in_stage("config", [&] { return parse_config_file(config_path); });
  in_stage("config", [&] { validate_config(config); });
  out << "ok: loader=" << config.input.name << " algorithm=" << config.partition.algorithm
      << " profile=" << config.profile << " transforms=" << config.transforms.size() << "\n";
  return 0;
}

int cmd_partition(const std::string& config_path, std::ostream& out) {
  PipelineConfig config = in_stage("config", [&] { return parse_config_file(config_path); });
  in_stage("config", [&] {
    validate_config(config);
    if (!config.output.busmap) throw Error(ErrorCode::ConfigError, "output.busmap is required for 'partition'");
  });
  Network net = prepare_network(config);
  PartitionResult p = in_stage("partition", [&] { return partition(net, config.partition); });
  write_partition_outputs(config, net, p);
  out << "clusters=" << p.cluster_count << " busmap=" << config.output.busmap->string() << "\n";
  return 0;
}

int cmd_aggregate(const std::string& config_path, const std::string& busmap, std::ostream& out) {
  PipelineConfig config = in_stage("config", [&] { return parse_config_file(config_path); });
  in_stage("config", [&] { validate_config(config); });
  Network net = prepare_network(config);
  PartitionResult p = load_busmap(net, busmap);
  AggregationOutput result = aggregate(net, p, config);
  write_aggregation_outputs(config, result);
  out << "nodes=" << result.network.node_count() << " edges=" << result.network.edge_count() << "\n";
  return 0;
}

int cmd_run(const std::string& config_path, std::ostream& out) {
  PipelineConfig config = in_stage("config", [&] { return parse_config_file(config_path); });
  PipelineResult r = run_pipeline(config);
  out << "clusters=" << r.partition.cluster_count << " nodes=" << r.aggregated.node_count()
      << " edges=" << r.aggregated.edge_count() << "\n";
  return 0;
}

int cmd_viz(const std::string& config_path, const std::string& busmap, const std::string& out_path,
            std::ostream& out) {
  PipelineConfig config = in_stage("config", [&] { return parse_config_file(config_path); });
  if (!out_path.empty()) config.output.viz = out_path;
  in_stage("config", [&] {
    validate_config(config);
    if (!config.output.viz) throw Error(ErrorCode::ConfigError, "output.viz or --out is required for 'viz'");
  });
  Network net = prepare_network(config);
  PartitionResult p = load_busmap(net, busmap);
  in_stage("viz", [&] { export_visualization(net, &p, nullptr, *config.output.viz); });
  out << "viz=" << config.output.viz->string() << "\n";
  return 0;
}

}  // namespace

int exit_code_for(const Error& e) {
  if (e.stage() == "config") return 2;
  switch (e.code()) {
    case ErrorCode::ConfigError:
    case ErrorCode::UnknownStrategy:
    case ErrorCode::UnknownTransform:
    case ErrorCode::DuplicateStrategyName:
      return 2;
    case ErrorCode::InfeasibleClusterCount:
    case ErrorCode::InvalidK:
    case ErrorCode::InvalidParameter:
      return 4;
    default:
      return 3;
  }
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Partition a network into clusters and aggregate it", "netreduce");
  app.require_subcommand(1);

  std::string config, busmap, viz_out;
  auto* validate = app.add_subcommand("validate", "Parse a config and resolve every referenced name");
  validate->add_option("config", config, "TOML pipeline config")->required();
  auto* part = app.add_subcommand("partition", "Load, preprocess and partition; write the busmap");
  part->add_option("config", config, "TOML pipeline config")->required();
  auto* agg = app.add_subcommand("aggregate", "Aggregate from an existing busmap");
  agg->add_option("config", config, "TOML pipeline config")->required();
  agg->add_option("--busmap", busmap, "busmap CSV (node_id, cluster_id)")->required();
  auto* run = app.add_subcommand("run", "Full pipeline");
  run->add_option("config", config, "TOML pipeline config")->required();
  auto* viz = app.add_subcommand("viz", "Emit GeoJSON or DOT for the network colored by cluster");
  viz->add_option("config", config, "TOML pipeline config")->required();
  viz->add_option("--busmap", busmap, "busmap CSV (node_id, cluster_id)")->required();
  viz->add_option("--out", viz_out, "output path, overriding output.viz");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "stage=cli code=UsageError msg=" << one_line(e.what()) << "\n";
    return 1;
  }

  try {
    if (*validate) return cmd_validate(config, out);
    if (*part) return cmd_partition(config, out);
    if (*agg) return cmd_aggregate(config, busmap, out);
    if (*run) return cmd_run(config, out);
    if (*viz) return cmd_viz(config, busmap, viz_out, out);
  } catch (const Error& e) {
    err << "stage=" << (e.stage().empty() ? "unknown" : e.stage()) << " code=" << to_string(e.code())
        << " msg=" << one_line(e.what()) << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "stage=unknown code=IoError msg=" << one_line(e.what()) << "\n";
    return 3;
  }
  return 1;
}

}  // namespace netreduce
