#pragma once

#include <stdexcept>
#include <string>

namespace opeq {

enum class ErrorCode {
  BadArgument,
  NonFinite,
  DimMismatch,
  ConvergenceFailure,
  NegativePowerOfSingular,
  FractionalPowerOfIndefinite,
  SingularDenominator,
  DimTooLarge,
  NumericallySingular,
  DegenerateExponent,
  NonPositiveEigenvalue,
  NotPsd,
  RConditionInvalid,
  ParseError,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadArgument: return "BadArgument";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::NegativePowerOfSingular: return "NegativePowerOfSingular";
    case ErrorCode::FractionalPowerOfIndefinite: return "FractionalPowerOfIndefinite";
    case ErrorCode::SingularDenominator: return "SingularDenominator";
    case ErrorCode::DimTooLarge: return "DimTooLarge";
    case ErrorCode::NumericallySingular: return "NumericallySingular";
    case ErrorCode::DegenerateExponent: return "DegenerateExponent";
    case ErrorCode::NonPositiveEigenvalue: return "NonPositiveEigenvalue";
    case ErrorCode::NotPsd: return "NotPsd";
    case ErrorCode::RConditionInvalid: return "RConditionInvalid";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "UnknownError";
}

/// Library-wide exception carrying a machine-checkable error code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace opeq
