#pragma once

#include <stdexcept>
#include <string>

namespace am {

enum class ErrorCode {
  ZeroGradient,
  DimensionMismatch,
  OutOfRange,
  NonPositiveBound,
  NonPositiveParameter,
  SeedOutsideCube,
  DegenerateManifold,
  NonMonotoneValues,
  UnsortedKnots,
  LengthMismatch,
  EmptySamples,
  NotFitted,
  InvalidArgument,
  ParseError,
  UnknownModel,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroGradient: return "ZeroGradient";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NonPositiveBound: return "NonPositiveBound";
    case ErrorCode::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorCode::SeedOutsideCube: return "SeedOutsideCube";
    case ErrorCode::DegenerateManifold: return "DegenerateManifold";
    case ErrorCode::NonMonotoneValues: return "NonMonotoneValues";
    case ErrorCode::UnsortedKnots: return "UnsortedKnots";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptySamples: return "EmptySamples";
    case ErrorCode::NotFitted: return "NotFitted";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownModel: return "UnknownModel";
  }
  return "Unknown";
}

/// Exception carrying a machine-checkable error code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace am
