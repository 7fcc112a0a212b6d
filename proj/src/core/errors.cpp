#include "core/errors.hpp"

namespace pcrlab {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::RankError: return "RankError";
    case ErrorCode::DegenerateExposure: return "DegenerateExposure";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::SingularityError: return "SingularityError";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::NotAvailable: return "NotAvailable";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace pcrlab
