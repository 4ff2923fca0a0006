#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace indicial {

enum class ErrorCode {
  TripleIndex,
  VarianceClash,
  ArityMismatch,
  MixedFreeIndices,
  SyntaxError,
  UnknownCommand,
  ConflictingDeclaration,
  NoMetric,
  NotAntisymmetric,
  PatternIndexCollision,
  UnboundMetavariable,
  IterationCapExceeded,
  SignatureMismatch,
  NonScalarLagrangian,
  FreeIndexMismatch,
  UnboundName,
  InertOperatorPresent,
  CanonicalizationLimit,
  HistoryOutOfRange,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the engine carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// Parse-level failures map to exit status 1, everything else to 2.
  bool is_parse_error() const noexcept {
    return code_ == ErrorCode::SyntaxError || code_ == ErrorCode::UnknownCommand;
  }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace indicial
