#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace distort {

enum class ErrorCode {
  InvalidArgument,
  NonSuccessive,
  InvalidExponent,
  TooLarge,
  ZeroVector,
  NonConvergence,
  NotNormalized,
  Unavailable,
  PreconditionFailed,
  OutOfRange,
  ConstantViolated,
  HypothesisViolated,
  NotFound,
  MassTooSmall,
  InvalidCertificate,
  ConfigError,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonSuccessive: return "NonSuccessive";
    case ErrorCode::InvalidExponent: return "InvalidExponent";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::Unavailable: return "Unavailable";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::ConstantViolated: return "ConstantViolated";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::MassTooSmall: return "MassTooSmall";
    case ErrorCode::InvalidCertificate: return "InvalidCertificate";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Every failure raised by the library. `measured` and `index` carry the
/// offending quantity when the error has one (a mass, a gap, a block index).
class Error : public std::runtime_error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Error(ErrorCode code, const std::string& what,
        double measured = std::numeric_limits<double>::quiet_NaN(),
        std::size_t index = npos)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        measured_(measured),
        index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  double measured() const noexcept { return measured_; }
  std::size_t index() const noexcept { return index_; }
  bool has_measured() const noexcept { return !std::isnan(measured_); }

 private:
  ErrorCode code_;
  double measured_;
  std::size_t index_;
};

}  // namespace distort
