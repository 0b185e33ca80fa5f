#include "cst/error.hpp"

namespace cst {

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidScaleCount:
    case ErrorCode::InvalidK:
    case ErrorCode::IndexError:
      return ErrorCategory::Usage;
    case ErrorCode::InsufficientSamples:
    case ErrorCode::InvalidData:
    case ErrorCode::ShapeError:
    case ErrorCode::ParseError:
    case ErrorCode::IoError:
      return ErrorCategory::Data;
    case ErrorCode::NotSymmetric:
    case ErrorCode::NoConvergence:
    case ErrorCode::DegenerateCovariance:
    case ErrorCode::DomainError:
    case ErrorCode::DegenerateSpectrum:
    case ErrorCode::SingularSystem:
      return ErrorCategory::Numerical;
  }
  return ErrorCategory::Numerical;
}

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::InvalidData: return "InvalidData";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateCovariance: return "DegenerateCovariance";
    case ErrorCode::InvalidScaleCount: return "InvalidScaleCount";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::IndexError: return "IndexError";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace cst
