#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lens {

enum class ErrorCode {
  invalid_params,
  unknown_model,
  non_convergence,
  singular_jacobian,
  degenerate_system,
  degenerate_parameters,
  incomplete_solve,
  caustic_source,
  incomplete,
  unequal_degrees,
  degenerate_multiplier,
  empty_critical_set,
  internal,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; the code tells callers which
/// contract was violated.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace lens
