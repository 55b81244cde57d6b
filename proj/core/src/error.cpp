#include "lens/error.hpp"

namespace lens {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_params: return "InvalidParams";
    case ErrorCode::unknown_model: return "UnknownModel";
    case ErrorCode::non_convergence: return "NonConvergence";
    case ErrorCode::singular_jacobian: return "SingularJacobian";
    case ErrorCode::degenerate_system: return "DegenerateSystem";
    case ErrorCode::degenerate_parameters: return "DegenerateParameters";
    case ErrorCode::incomplete_solve: return "IncompleteSolve";
    case ErrorCode::caustic_source: return "CausticSource";
    case ErrorCode::incomplete: return "Incomplete";
    case ErrorCode::unequal_degrees: return "UnequalDegrees";
    case ErrorCode::degenerate_multiplier: return "DegenerateMultiplier";
    case ErrorCode::empty_critical_set: return "EmptyCriticalSet";
    case ErrorCode::internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace lens
