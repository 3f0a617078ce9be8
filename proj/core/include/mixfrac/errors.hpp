#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mixfrac {

enum class ErrorCode {
  NonProbabilityWeights,
  BadBase,
  BadAtom,
  BadCell,
  EmptySupport,
  DimensionMismatch,
  ZeroDenominator,
  BadArgument,
  InsufficientDepths,
  NotMultinomial,
  ZeroWeightWithNegativeQ,
  NoBracket,
  BadSplit,
  NonConvexBeyondTolerance,
  GridMismatch,
  OutsideSupport,
  BadAlpha,
  SchemaError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every library failure is reported through this type; `code()` lets callers
// branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mixfrac
