#include "cptherm/error.hpp"

namespace cpt {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInvalidSystem: return "invalid-system";
    case ErrorCode::kInsufficientWord: return "insufficient-word";
    case ErrorCode::kNoUniquePerron: return "no-unique-perron";
    case ErrorCode::kNoConvergence: return "no-convergence";
    case ErrorCode::kInconclusive: return "inconclusive";
    case ErrorCode::kInvalidCover: return "invalid-cover";
    case ErrorCode::kInvalidBudget: return "invalid-budget";
    case ErrorCode::kConfigError: return "config-error";
    case ErrorCode::kIoError: return "io-error";
  }
  return "unknown";
}

}  // namespace cpt
