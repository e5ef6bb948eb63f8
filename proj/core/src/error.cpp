#include "netreduce/error.hpp"

namespace netreduce {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DuplicateNodeId: return "DuplicateNodeId";
    case ErrorCode::DuplicateEdgeId: return "DuplicateEdgeId";
    case ErrorCode::EdgeEndpointMissing: return "EdgeEndpointMissing";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::NonPositiveReactance: return "NonPositiveReactance";
    case ErrorCode::InvalidCoordinate: return "InvalidCoordinate";
    case ErrorCode::InvalidAttribute: return "InvalidAttribute";
    case ErrorCode::UnknownNodeId: return "UnknownNodeId";
    case ErrorCode::UnknownEdgeId: return "UnknownEdgeId";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DuplicateStrategyName: return "DuplicateStrategyName";
    case ErrorCode::UnknownStrategy: return "UnknownStrategy";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::MissingCoordinates: return "MissingCoordinates";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NotAnIsland: return "NotAnIsland";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::InfeasibleClusterCount: return "InfeasibleClusterCount";
    case ErrorCode::StrategyContractViolation: return "StrategyContractViolation";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::UnknownTransform: return "UnknownTransform";
    case ErrorCode::UnknownProperty: return "UnknownProperty";
    case ErrorCode::PartitionDomainMismatch: return "PartitionDomainMismatch";
    case ErrorCode::ReducerTypeMismatch: return "ReducerTypeMismatch";
    case ErrorCode::NonPositiveForParallel: return "NonPositiveForParallel";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace netreduce
