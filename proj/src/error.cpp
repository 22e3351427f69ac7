#include "btom/error.hpp"

namespace btom {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingStart: return "MissingStart";
    case ErrorCode::WrongExitCount: return "WrongExitCount";
    case ErrorCode::UnreachableExit: return "UnreachableExit";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::BadMazeSyntax: return "BadMazeSyntax";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::UnreachableGoal: return "UnreachableGoal";
    case ErrorCode::ZeroMass: return "ZeroMass";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IllegalAction: return "IllegalAction";
    case ErrorCode::OrderViolation: return "OrderViolation";
    case ErrorCode::EmptyPool: return "EmptyPool";
    case ErrorCode::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorCode::CorruptTrajectory: return "CorruptTrajectory";
    case ErrorCode::BadRecord: return "BadRecord";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::UnknownTrajectory: return "UnknownTrajectory";
    case ErrorCode::UnknownMaze: return "UnknownMaze";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::PortInUse: return "PortInUse";
  }
  return "Unknown";
}

}  // namespace btom
