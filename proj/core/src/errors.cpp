#include "mixfrac/errors.hpp"

namespace mixfrac {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonProbabilityWeights: return "NonProbabilityWeights";
    case ErrorCode::BadBase: return "BadBase";
    case ErrorCode::BadAtom: return "BadAtom";
    case ErrorCode::BadCell: return "BadCell";
    case ErrorCode::EmptySupport: return "EmptySupport";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::BadArgument: return "BadArgument";
    case ErrorCode::InsufficientDepths: return "InsufficientDepths";
    case ErrorCode::NotMultinomial: return "NotMultinomial";
    case ErrorCode::ZeroWeightWithNegativeQ: return "ZeroWeightWithNegativeQ";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::BadSplit: return "BadSplit";
    case ErrorCode::NonConvexBeyondTolerance: return "NonConvexBeyondTolerance";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::OutsideSupport: return "OutsideSupport";
    case ErrorCode::BadAlpha: return "BadAlpha";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace mixfrac
