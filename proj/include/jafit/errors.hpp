#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace jafit {

enum class ErrorCode {
  InvalidArgument,
  // root finding
  NoConvergence,
  InvalidBracket,
  NoSignChange,
  // anhysteretic algebra
  UnstableParams,
  SingularSlope,
  SingularDenominator,
  // JA_par
  NoPositiveSample,
  NoSolution,
  LengthMismatch,
  DegenerateSweep,
  // Jiles-1992 baseline
  DegenerateC,
  ZeroDenominator,
  // simulation
  SaturationExceeded,
  // data input
  ParseError,
  UnitError,
  EmptyFile,
  NonMonotone,
  MissingBranch,
  InsufficientSamples,
};

std::string_view to_string(ErrorCode code);

/// True for codes caused by bad input data or arguments rather than by a
/// numerical failure on valid input.
bool is_input_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Non-fatal diagnostic attached to results and reports.
struct Warning {
  std::string code;
  std::string message;

  bool operator==(const Warning&) const = default;
};

}  // namespace jafit
