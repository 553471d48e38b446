#include "specreg/error.hpp"

namespace specreg {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonSymmetric: return "NonSymmetric";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DimensionZero: return "DimensionZero";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::EmptyPointSet: return "EmptyPointSet";
    case ErrorCode::GridTooLarge: return "GridTooLarge";
    case ErrorCode::InvalidCount: return "InvalidCount";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::InvalidIndex: return "InvalidIndex";
    case ErrorCode::InvalidLambda: return "InvalidLambda";
    case ErrorCode::LandweberContraction: return "LandweberContraction";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::QualificationExceeded: return "QualificationExceeded";
    case ErrorCode::InvalidSmoothness: return "InvalidSmoothness";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::QuadratureUnderResolved: return "QuadratureUnderResolved";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::Unsupported: return "Unsupported";
  }
  return "Unknown";
}

}  // namespace specreg
