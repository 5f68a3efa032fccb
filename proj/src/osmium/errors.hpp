#pragma once

#include <stdexcept>
#include <string>

namespace osmium {

enum class ErrorCode {
  OrderingViolation,
  TooFewSpecies,
  NotIdentityForUncharged,
  NotSimpleSalt,
  NotNeutral,
  DependentReactions,
  SingularTransform,
  NonpositiveConcentration,
  NonpositiveDiffusivity,
  CholeskyFailure,
  DomainError,
  UnsupportedOrder,
  NonpositiveNormalizer,
  NonConvergence,
  SingularLinearSystem,
  ConfigError,
  IoError,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::OrderingViolation: return "OrderingViolation";
    case ErrorCode::TooFewSpecies: return "TooFewSpecies";
    case ErrorCode::NotIdentityForUncharged: return "NotIdentityForUncharged";
    case ErrorCode::NotSimpleSalt: return "NotSimpleSalt";
    case ErrorCode::NotNeutral: return "NotNeutral";
    case ErrorCode::DependentReactions: return "DependentReactions";
    case ErrorCode::SingularTransform: return "SingularTransform";
    case ErrorCode::NonpositiveConcentration: return "NonpositiveConcentration";
    case ErrorCode::NonpositiveDiffusivity: return "NonpositiveDiffusivity";
    case ErrorCode::CholeskyFailure: return "CholeskyFailure";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::NonpositiveNormalizer: return "NonpositiveNormalizer";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::SingularLinearSystem: return "SingularLinearSystem";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace osmium
