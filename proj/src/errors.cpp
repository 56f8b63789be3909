#include "jafit/errors.hpp"

namespace jafit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InvalidBracket: return "InvalidBracket";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::UnstableParams: return "UnstableParams";
    case ErrorCode::SingularSlope: return "SingularSlope";
    case ErrorCode::SingularDenominator: return "SingularDenominator";
    case ErrorCode::NoPositiveSample: return "NoPositiveSample";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DegenerateSweep: return "DegenerateSweep";
    case ErrorCode::DegenerateC: return "DegenerateC";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::SaturationExceeded: return "SaturationExceeded";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnitError: return "UnitError";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::NonMonotone: return "NonMonotone";
    case ErrorCode::MissingBranch: return "MissingBranch";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::NoPositiveSample:
    case ErrorCode::LengthMismatch:
    case ErrorCode::DegenerateC:
    case ErrorCode::ZeroDenominator:
    case ErrorCode::ParseError:
    case ErrorCode::UnitError:
    case ErrorCode::EmptyFile:
    case ErrorCode::NonMonotone:
    case ErrorCode::MissingBranch:
    case ErrorCode::InsufficientSamples:
      return true;
    default:
      return false;
  }
}

}  // namespace jafit
