#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace cstate {

enum class ErrorCode {
  invalid_argument,
  unsupported_dimension,
  numerical_failure,
  degenerate_basis,
  out_of_domain,
  base_section_zero,
  dimension_mismatch,
  empty_model,
  not_determining_set,
  antipodal_pair,
  invalid_generator,
  non_unitary,
  chart_exit,
  invalid_config,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::unsupported_dimension: return "unsupported-dimension";
    case ErrorCode::numerical_failure: return "numerical-failure";
    case ErrorCode::degenerate_basis: return "degenerate-basis";
    case ErrorCode::out_of_domain: return "out-of-domain";
    case ErrorCode::base_section_zero: return "base-section-zero";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::empty_model: return "empty-model";
    case ErrorCode::not_determining_set: return "not-determining-set";
    case ErrorCode::antipodal_pair: return "antipodal-pair";
    case ErrorCode::invalid_generator: return "invalid-generator";
    case ErrorCode::non_unitary: return "non-unitary";
    case ErrorCode::chart_exit: return "chart-exit";
    case ErrorCode::invalid_config: return "invalid-config";
  }
  return "unknown";
}

/// Single exception type for the library. `index()` carries the offending
/// node, pivot or basis index when one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what,
        std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

}  // namespace cstate
