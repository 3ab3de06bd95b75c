#pragma once

#include <stdexcept>
#include <string>

namespace ctxfrac {

// Every failure mode the library can signal.  Codes are grouped by the kind of
// input that went wrong so the CLI can map them to stable exit codes.
enum class ErrorCode {
  // scenario construction
  CoverViolation,
  DuplicateLabel,
  EmptyContext,
  UnknownMeasurementInContext,
  SizeCapExceeded,
  // model construction / empirical operations
  NegativeProbability,
  NormalizationViolation,
  ShapeMismatch,
  NotASubset,
  ScenarioMismatch,
  LambdaOutOfRange,
  // solver
  NumericalFailure,
  // decompositions / hvm constructions
  DegenerateResidual,
  AlphaOutOfRange,
  BoundGuaranteeViolation,
  NTooSmall,
  BadOutcomeChoice,
  // estimator inputs
  MissingField,
  OutOfRange,
  ManualValueMissing,
  BoundsInverted,
  // document handling
  ParseError,
  UnknownName,
};

// Coarse grouping used for CLI exit codes.
enum class ErrorCategory { Parse, Validation, Solver, EstimatorInput };

constexpr ErrorCategory category(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
      return ErrorCategory::Parse;
    case ErrorCode::NumericalFailure:
    case ErrorCode::BoundGuaranteeViolation:
      return ErrorCategory::Solver;
    case ErrorCode::MissingField:
    case ErrorCode::OutOfRange:
    case ErrorCode::ManualValueMissing:
    case ErrorCode::BoundsInverted:
      return ErrorCategory::EstimatorInput;
    default:
      return ErrorCategory::Validation;
  }
}

constexpr const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::CoverViolation: return "CoverViolation";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::EmptyContext: return "EmptyContext";
    case ErrorCode::UnknownMeasurementInContext: return "UnknownMeasurementInContext";
    case ErrorCode::SizeCapExceeded: return "SizeCapExceeded";
    case ErrorCode::NegativeProbability: return "NegativeProbability";
    case ErrorCode::NormalizationViolation: return "NormalizationViolation";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NotASubset: return "NotASubset";
    case ErrorCode::ScenarioMismatch: return "ScenarioMismatch";
    case ErrorCode::LambdaOutOfRange: return "LambdaOutOfRange";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::DegenerateResidual: return "DegenerateResidual";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::BoundGuaranteeViolation: return "BoundGuaranteeViolation";
    case ErrorCode::NTooSmall: return "NTooSmall";
    case ErrorCode::BadOutcomeChoice: return "BadOutcomeChoice";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::ManualValueMissing: return "ManualValueMissing";
    case ErrorCode::BoundsInverted: return "BoundsInverted";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownName: return "UnknownName";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace ctxfrac
