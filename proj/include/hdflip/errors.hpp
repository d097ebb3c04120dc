#ifndef HDFLIP_ERRORS_HPP
#define HDFLIP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hdflip {

// Machine-readable failure categories. The CLI maps these to its error
// output, so the set is part of the tool's interface.
enum class ErrorCode {
  SingularGram,
  IndexOutOfRange,
  InvalidB,
  CapacityExceeded,
  NoConvergence,
  EmptySubset,
  SubsetTooLarge,
  NonPositiveDf,
  ParseError,
  DimensionMismatch,
  NonFiniteValue,
  InvalidRho,
  ZeroSignal,
  InvalidConfig,
};

inline const char* error_category(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularGram:      return "singular_gram";
    case ErrorCode::IndexOutOfRange:   return "index_out_of_range";
    case ErrorCode::InvalidB:          return "invalid_b";
    case ErrorCode::CapacityExceeded:  return "capacity_exceeded";
    case ErrorCode::NoConvergence:     return "no_convergence";
    case ErrorCode::EmptySubset:       return "empty_subset";
    case ErrorCode::SubsetTooLarge:    return "subset_too_large";
    case ErrorCode::NonPositiveDf:     return "non_positive_df";
    case ErrorCode::ParseError:        return "parse_error";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::NonFiniteValue:    return "non_finite_value";
    case ErrorCode::InvalidRho:        return "invalid_rho";
    case ErrorCode::ZeroSignal:        return "zero_signal";
    case ErrorCode::InvalidConfig:     return "invalid_config";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_category(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }
  const char* category() const { return error_category(code_); }

 private:
  ErrorCode code_;
};

}  // namespace hdflip

#endif  // HDFLIP_ERRORS_HPP
