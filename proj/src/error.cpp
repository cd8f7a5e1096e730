#include "shiftlab/error.hpp"

namespace shiftlab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::CenterMismatch: return "CenterMismatch";
    case ErrorCode::CompositionMismatch: return "CompositionMismatch";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::NonFiniteCoefficient: return "NonFiniteCoefficient";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DomainEscape: return "DomainEscape";
    case ErrorCode::NotPeriodicLift: return "NotPeriodicLift";
    case ErrorCode::NotMonotone: return "NotMonotone";
    case ErrorCode::InconclusiveBudget: return "InconclusiveBudget";
    case ErrorCode::NotContractive: return "NotContractive";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::OracleGap: return "OracleGap";
    case ErrorCode::NeutralMultiplier: return "NeutralMultiplier";
    case ErrorCode::JetTooShort: return "JetTooShort";
    case ErrorCode::NotFixedPoint: return "NotFixedPoint";
    case ErrorCode::NoContraction: return "NoContraction";
    case ErrorCode::CoefficientOverflow: return "CoefficientOverflow";
    case ErrorCode::DegenerateLeadingCoefficient: return "DegenerateLeadingCoefficient";
    case ErrorCode::NotExpansive: return "NotExpansive";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::PositivityLost: return "PositivityLost";
    case ErrorCode::BranchNotFixed: return "BranchNotFixed";
    case ErrorCode::JetRadiusExceeded: return "JetRadiusExceeded";
    case ErrorCode::DepthTooSmall: return "DepthTooSmall";
    case ErrorCode::SingularMatching: return "SingularMatching";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
    case ErrorCode::ConfigInfeasible: return "ConfigInfeasible";
    case ErrorCode::LambdaTooSmall: return "LambdaTooSmall";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace shiftlab
