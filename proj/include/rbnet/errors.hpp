#pragma once

#include <stdexcept>
#include <string>

namespace rbnet {

enum class ErrorCode {
  ParseError,
  NodeSetMismatch,
  LabelMismatch,
  InvalidNode,
  InvalidEdge,
  AlternationViolation,
  DisabledStep,
  AmbiguousChoice,
  NotCommBounded,
  NotBalanced,
  NotDiverging,
  InsufficientCopies,
  InvalidSchedule,
  BudgetUnbounded,
  UnknownFormat,
  PreconditionViolated,
  InternalError,
};

const char* error_code_name(ErrorCode code);

// Library-wide exception; `code()` identifies the failure class so callers
// (CLI, bindings) can map it to exit codes without string matching.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace rbnet
