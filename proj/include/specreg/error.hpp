#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace specreg {

enum class ErrorCode {
  NonSymmetric,
  NonFinite,
  DimensionZero,
  DimensionMismatch,
  TooFewPoints,
  EmptyPointSet,
  GridTooLarge,
  InvalidCount,
  DomainViolation,
  InvalidIndex,
  InvalidLambda,
  LandweberContraction,
  EmptyGrid,
  QualificationExceeded,
  InvalidSmoothness,
  InvalidInput,
  QuadratureUnderResolved,
  DegenerateData,
  ConfigInvalid,
  IoError,
  Unsupported,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace specreg
