#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace netreduce {

enum class ErrorCode {
  // graph-core
  DuplicateNodeId,
  DuplicateEdgeId,
  EdgeEndpointMissing,
  SelfLoop,
  NonPositiveReactance,
  InvalidCoordinate,
  InvalidAttribute,
  UnknownNodeId,
  UnknownEdgeId,
  // ingest / io
  FileNotFound,
  MissingColumn,
  MalformedInput,
  IoError,
  // registries
  DuplicateStrategyName,
  UnknownStrategy,
  // preprocess / distance
  DomainMismatch,
  MissingCoordinates,
  SingularSystem,
  NotAnIsland,
  // partition
  InvalidK,
  InfeasibleClusterCount,
  StrategyContractViolation,
  InvalidParameter,
  // aggregate
  UnknownTransform,
  UnknownProperty,
  PartitionDomainMismatch,
  ReducerTypeMismatch,
  NonPositiveForParallel,
  // pipeline
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a machine-readable code. The
/// optional stage tag is attached by the pipeline when an error crosses a
/// stage boundary.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }
  void set_stage(std::string stage) { stage_ = std::move(stage); }

 private:
  ErrorCode code_;
  std::string stage_;
};

}  // namespace netreduce
