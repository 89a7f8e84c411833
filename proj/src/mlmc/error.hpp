#pragma once

#include <stdexcept>
#include <string>

namespace mlmc {

enum class ErrorCode {
  invalid_argument,
  config,
  sampling_failure,
  insufficient_samples,
  invalid_split,
  calibration_unavailable,
  tolerance_unreachable,
  iteration_limit,
  estimate_undefined,
  io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mlmc
