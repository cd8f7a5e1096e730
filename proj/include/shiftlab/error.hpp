#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shiftlab {

// Every failure raised by the library carries one of these codes. The CLI maps
// them to exit status 2 and prints the code name in its error JSON.
enum class ErrorCode {
  CenterMismatch,
  CompositionMismatch,
  WindowTooLarge,
  NonFiniteCoefficient,
  InvalidArgument,
  NoConvergence,
  DomainEscape,
  NotPeriodicLift,
  NotMonotone,
  InconclusiveBudget,
  NotContractive,
  CapExceeded,
  OracleGap,
  NeutralMultiplier,
  JetTooShort,
  NotFixedPoint,
  NoContraction,
  CoefficientOverflow,
  DegenerateLeadingCoefficient,
  NotExpansive,
  NonConvergence,
  GridMismatch,
  PositivityLost,
  BranchNotFixed,
  JetRadiusExceeded,
  DepthTooSmall,
  SingularMatching,
  PreconditionViolation,
  ConfigInfeasible,
  LambdaTooSmall,
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace shiftlab
