#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cst {

enum class ErrorCode {
  InvalidArgument,
  InsufficientSamples,
  InvalidData,
  NotSymmetric,
  NoConvergence,
  DegenerateCovariance,
  InvalidScaleCount,
  DomainError,
  DegenerateSpectrum,
  ShapeError,
  IndexError,
  InvalidK,
  SingularSystem,
  ParseError,
  IoError,
};

/// Coarse grouping used by the CLI to pick an exit status.
enum class ErrorCategory { Usage, Data, Numerical };

ErrorCategory category_of(ErrorCode code) noexcept;
std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace cst
