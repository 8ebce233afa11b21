#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hardy {

enum class ErrorCode {
  DomainError,
  QuadratureError,
  UnsupportedPotential,
  UnsupportedSingularity,
  StepSizeUnderflow,
  NonPositiveTrajectory,
  GridTooCoarse,
  NoUpperBracket,
  IndeterminateAtHorizon,
  RangeError,
  SingularMass,
  IndefiniteForm,
  NonMonotoneSequence,
  BoundaryConditionViolated,
  DegenerateDenominator,
  InvalidP,
  ConfigError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::QuadratureError: return "QuadratureError";
    case ErrorCode::UnsupportedPotential: return "UnsupportedPotential";
    case ErrorCode::UnsupportedSingularity: return "UnsupportedSingularity";
    case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::NonPositiveTrajectory: return "NonPositiveTrajectory";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::NoUpperBracket: return "NoUpperBracket";
    case ErrorCode::IndeterminateAtHorizon: return "IndeterminateAtHorizon";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::SingularMass: return "SingularMass";
    case ErrorCode::IndefiniteForm: return "IndefiniteForm";
    case ErrorCode::NonMonotoneSequence: return "NonMonotoneSequence";
    case ErrorCode::BoundaryConditionViolated: return "BoundaryConditionViolated";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::InvalidP: return "InvalidP";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hardy
