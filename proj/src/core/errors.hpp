#pragma once

#include <stdexcept>
#include <string>

namespace pcrlab {

enum class ErrorCode {
  InvalidInput = 1,
  RankError,
  DegenerateExposure,
  InvalidSpec,
  SingularityError,
  NotApplicable,
  NotAvailable,
  ConfigError,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

// Single exception type for the library; the C API maps code() onto status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pcrlab
