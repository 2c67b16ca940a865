#include "retro/error.hpp"

namespace retro {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::negative_weight: return "NegativeWeight";
    case ErrorCode::empty_ballot: return "EmptyBallot";
    case ErrorCode::shape_mismatch: return "ShapeMismatch";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::degenerate_profile: return "DegenerateProfile";
    case ErrorCode::index_out_of_range: return "IndexOutOfRange";
    case ErrorCode::no_convergence: return "NoConvergence";
    case ErrorCode::target_unreachable: return "TargetUnreachable";
    case ErrorCode::precondition_unmet: return "PreconditionUnmet";
    case ErrorCode::regression_failure: return "RegressionFailure";
    case ErrorCode::config_error: return "ConfigError";
    case ErrorCode::io_error: return "IOError";
    case ErrorCode::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

int exit_status(ErrorCode code) noexcept {
  return 10 + static_cast<int>(code);
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace retro
