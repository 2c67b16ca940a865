#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace retro {

enum class ErrorCode {
  negative_weight,
  empty_ballot,
  shape_mismatch,
  parse_error,
  degenerate_profile,
  index_out_of_range,
  no_convergence,
  target_unreachable,
  precondition_unmet,
  regression_failure,
  config_error,
  io_error,
  invalid_argument,
};

// CamelCase name used in machine-readable error lines, e.g. "NegativeWeight".
std::string_view to_string(ErrorCode code) noexcept;

// Process exit status the CLI uses for this code. Always non-zero.
int exit_status(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace retro
