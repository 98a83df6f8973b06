#include "bcst/error.hpp"

namespace bcst {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::InvalidPermutation: return "InvalidPermutation";
    case ErrorCode::NonUnitary: return "NonUnitary";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DegenerateBranch: return "DegenerateBranch";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::NoUniqueCorrection: return "NoUniqueCorrection";
    case ErrorCode::ConditionViolated: return "ConditionViolated";
    case ErrorCode::IndeterminateControl: return "IndeterminateControl";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::InvalidRatio: return "InvalidRatio";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace bcst
