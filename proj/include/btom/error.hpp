#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace btom {

enum class ErrorCode {
  MissingStart,
  WrongExitCount,
  UnreachableExit,
  RaggedRows,
  BadMazeSyntax,
  Unreachable,
  UnreachableGoal,
  ZeroMass,
  InvalidConfig,
  IllegalAction,
  OrderViolation,
  EmptyPool,
  StepLimitExceeded,
  CorruptTrajectory,
  BadRecord,
  LengthMismatch,
  UnknownTrajectory,
  UnknownMaze,
  UnknownSession,
  IoError,
  PortInUse,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can tell which invariant was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace btom
