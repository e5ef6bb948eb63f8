#include "netreduce/pipeline.hpp"

#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "netreduce/error.hpp"
#include "netreduce/preprocess.hpp"
#include "netreduce/viz.hpp"

namespace netreduce {

namespace {

[[noreturn]] void config_error(const std::string& message) { throw Error(ErrorCode::ConfigError, message); }

const toml::table* section(const toml::table& root, const char* name) {
  const toml::node* n = root.get(name);
  if (!n) return nullptr;
  if (!n->is_table()) config_error(std::string("[") + name + "] must be a table");
  return n->as_table();
}

void reject_unknown(const toml::table& t, const std::string& prefix, std::initializer_list<std::string_view> known) {
  for (auto&& [key, _] : t) {
    bool ok = false;
    for (auto k : known) ok = ok || key.str() == k;
    if (!ok) config_error("unknown key '" + prefix + "." + std::string(key.str()) + "'");
  }
}

std::string get_string(const toml::table& t, const std::string& prefix, const char* key) {
  const toml::node* n = t.get(key);
  if (!n->is_string()) config_error(prefix + "." + key + " must be a string");
  return *n->value<std::string>();
}

bool get_bool(const toml::table& t, const std::string& prefix, const char* key) {
  const toml::node* n = t.get(key);
  if (!n->is_boolean()) config_error(prefix + "." + key + " must be a boolean");
  return *n->value<bool>();
}

std::int64_t get_int(const toml::table& t, const std::string& prefix, const char* key) {
  const toml::node* n = t.get(key);
  if (!n->is_integer()) config_error(prefix + "." + key + " must be an integer");
  return *n->value<std::int64_t>();
}

double get_number(const toml::table& t, const std::string& prefix, const char* key) {
  const toml::node* n = t.get(key);
  if (!n->is_number()) config_error(prefix + "." + key + " must be a number");
  return *n->value<double>();
}

int get_int32(const toml::table& t, const std::string& prefix, const char* key) {
  auto v = get_int(t, prefix, key);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    config_error(prefix + "." + key + " is out of range");
  }
  return static_cast<int>(v);
}

bool is_path_param(std::string_view key) {
  auto ends_with = [&](std::string_view suffix) { return key.ends_with(suffix); };
  return key == "dir" || key == "nodes" || key == "edges" || key == "path" || ends_with("_path") ||
         ends_with("_dir") || ends_with("_file");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_absolute() || base.empty()) return path;
  return base / path;
}

PropertyValue to_property(const toml::node& n, const std::string& where) {
  if (n.is_string()) return PropertyValue(*n.value<std::string>());
  if (n.is_boolean()) return PropertyValue(*n.value<bool>());
  if (n.is_number()) return PropertyValue(*n.value<double>());
  config_error(where + " must be a string, number or boolean");
}

void parse_input(const toml::table& t, const std::filesystem::path& base, PipelineConfig& config) {
  for (auto&& [key, value] : t) {
    const std::string k(key.str());
    if (!value.is_string()) config_error("input." + k + " must be a string");
    std::string text = *value.value<std::string>();
    if (k == "loader") {
      config.input.name = text;
    } else {
      config.input.params[k] = is_path_param(k) ? resolve(base, text).string() : text;
    }
  }
}

void parse_partition(const toml::table& t, PipelineConfig& config) {
  const std::string p = "partition";
  reject_unknown(t, p, {"algorithm", "family", "voltage_aware", "island_aware", "k", "eps", "min_pts", "seed",
                        "max_iter"});
  StrategySpec& s = config.partition;
  if (t.contains("algorithm")) s.algorithm = get_string(t, p, "algorithm");
  if (t.contains("family")) {
    auto text = get_string(t, p, "family");
    auto family = parse_distance_family(text);
    if (!family) config_error("partition.family must be 'geographical' or 'electrical', got '" + text + "'");
    s.family = *family;
  }
  if (t.contains("voltage_aware")) s.voltage_aware = get_bool(t, p, "voltage_aware");
  if (t.contains("island_aware")) s.island_aware = get_bool(t, p, "island_aware");
  if (t.contains("k")) s.k = get_int32(t, p, "k");
  if (t.contains("eps")) s.eps = get_number(t, p, "eps");
  if (t.contains("min_pts")) s.min_pts = get_int32(t, p, "min_pts");
  if (t.contains("seed")) {
    auto seed = get_int(t, p, "seed");
    if (seed < 0) config_error("partition.seed must be nonnegative");
    s.seed = static_cast<std::uint64_t>(seed);
  }
  if (t.contains("max_iter")) s.max_iter = get_int32(t, p, "max_iter");
}

void parse_aggregation(const toml::table& t, PipelineConfig& config) {
  const std::string p = "aggregation";
  reject_unknown(t, p, {"profile", "node_prefix", "transforms"});
  if (t.contains("profile")) config.profile = get_string(t, p, "profile");
  if (t.contains("node_prefix")) config.node_prefix = get_string(t, p, "node_prefix");
  if (const toml::node* list = t.get("transforms")) {
    const toml::array* arr = list->as_array();
    if (!arr) config_error("aggregation.transforms must be an array of tables");
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const std::string where = "aggregation.transforms[" + std::to_string(i) + "]";
      const toml::table* entry = arr->get(i)->as_table();
      if (!entry) config_error(where + " must be a table");
      if (!entry->contains("name")) config_error(where + ".name is required");
      DomainTransform transform;
      transform.name = get_string(*entry, where, "name");
      for (auto&& [key, value] : *entry) {
        if (key.str() == "name") continue;
        transform.params.insert_or_assign(std::string(key.str()),
                                          to_property(value, where + "." + std::string(key.str())));
      }
      config.transforms.push_back(std::move(transform));
    }
  }
}

void parse_output(const toml::table& t, const std::filesystem::path& base, PipelineConfig& config) {
  const std::string p = "output";
  reject_unknown(t, p, {"busmap", "network_dir", "membership", "viz"});
  auto path_of = [&](const char* key) -> std::optional<std::filesystem::path> {
    if (!t.contains(key)) return std::nullopt;
    return resolve(base, get_string(t, p, key));
  };
  config.output.busmap = path_of("busmap");
  config.output.network_dir = path_of("network_dir");
  config.output.membership = path_of("membership");
  config.output.viz = path_of("viz");
}

void ensure_parent(const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
}

}  // namespace

PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "invalid TOML at line " << e.source().begin.line << ": " << e.description();
    config_error(msg.str());
  }
  reject_unknown(root, "config", {"input", "preprocess", "partition", "aggregation", "output"});

  PipelineConfig config;
  if (const toml::table* t = section(root, "input")) parse_input(*t, base_dir, config);
  if (const toml::table* t = section(root, "preprocess")) {
    reject_unknown(*t, "preprocess", {"consolidate_parallel"});
    if (t->contains("consolidate_parallel")) {
      config.consolidate_parallel = get_bool(*t, "preprocess", "consolidate_parallel");
    }
  }
  if (const toml::table* t = section(root, "partition")) parse_partition(*t, config);
  if (const toml::table* t = section(root, "aggregation")) parse_aggregation(*t, config);
  if (const toml::table* t = section(root, "output")) parse_output(*t, base_dir, config);
  return config;
}

PipelineConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "config file not found: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

void validate_config(const PipelineConfig& config) {
  if (config.input.name.empty()) config_error("input.loader is required");
  if (!loader_registry().contains(config.input.name)) {
    throw Error(ErrorCode::UnknownStrategy, "unknown loader '" + config.input.name + "'");
  }
  validate_strategy(config.partition);
  validate_profile(profile_registry().get(config.profile));
  for (const auto& t : config.transforms) {
    if (!transform_registry().contains(t.name)) {
      throw Error(ErrorCode::UnknownTransform, "unknown domain transform '" + t.name + "'");
    }
  }
  if (config.node_prefix.empty()) config_error("aggregation.node_prefix must not be empty");
  if (config.output.viz) {
    auto ext = config.output.viz->extension().string();
    if (ext != ".geojson" && ext != ".json" && ext != ".dot" && ext != ".gv") {
      config_error("output.viz must end in .geojson, .json, .dot or .gv");
    }
  }
}

Network prepare_network(const PipelineConfig& config) {
  Network net = in_stage("ingest", [&] { return load(config.input); });
  if (config.consolidate_parallel) {
    net = in_stage("preprocess", [&] { return consolidate_parallel_edges(net); });
  }
  return net;
}

AggregationOutput aggregate(const Network& prepared, const PartitionResult& p, const PipelineConfig& config) {
  TopologyResult tier1 =
      in_stage("aggregate.topology", [&] { return aggregate_topology(prepared, p, config.node_prefix); });
  Network tier2 =
      in_stage("aggregate.transforms", [&] { return apply_domain_transforms(tier1.network, config.transforms); });
  Network tier3 = in_stage("aggregate.properties", [&] {
    return aggregate_properties(tier2, tier1.membership, prepared, profile_registry().get(config.profile));
  });
  return {std::move(tier3), std::move(tier1.membership)};
}

void write_partition_outputs(const PipelineConfig& config, const Network& prepared, const PartitionResult& p) {
  in_stage("output", [&] {
    if (config.output.busmap) {
      ensure_parent(*config.output.busmap);
      write_busmap(p, *config.output.busmap);
      write_partition_metadata(p, metadata_path_for(*config.output.busmap));
    }
    if (config.output.viz) {
      ensure_parent(*config.output.viz);
      export_visualization(prepared, &p, nullptr, *config.output.viz);
    }
  });
}

void write_aggregation_outputs(const PipelineConfig& config, const AggregationOutput& out) {
  in_stage("output", [&] {
    if (config.output.network_dir) {
      std::filesystem::create_directories(*config.output.network_dir);
      export_csv(out.network, *config.output.network_dir);
    }
    if (config.output.membership) {
      ensure_parent(*config.output.membership);
      write_membership_json(out.membership, *config.output.membership);
    }
  });
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  in_stage("config", [&] { validate_config(config); });
  Network prepared = prepare_network(config);
  PartitionResult p = in_stage("partition", [&] { return partition(prepared, config.partition); });
  write_partition_outputs(config, prepared, p);
  AggregationOutput out = aggregate(prepared, p, config);
  write_aggregation_outputs(config, out);
  return {std::move(p), std::move(out.network), std::move(out.membership)};
}

}  // namespace netreduce
