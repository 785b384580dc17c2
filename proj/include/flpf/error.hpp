#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flpf {

enum class ErrorCode {
  AsymmetricInterference,
  SelfInterference,
  UnknownLink,
  EmptyActiveSet,
  LimitExceeded,
  ProbabilityOutOfRange,
  ProbabilitiesDontSumToOne,
  DuplicateState,
  InvalidState,
  NumericOverflow,
  MalformedProgram,
  NotInPhi,
  UndefinedRatio,
  InvalidTriple,
  DecompositionNotInPhi,
  DeltaTooLargeForTargetRate,
  TraceTooShort,
  Parse,
  Unsupported,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::AsymmetricInterference: return "AsymmetricInterference";
    case ErrorCode::SelfInterference: return "SelfInterference";
    case ErrorCode::UnknownLink: return "UnknownLink";
    case ErrorCode::EmptyActiveSet: return "EmptyActiveSet";
    case ErrorCode::LimitExceeded: return "LimitExceeded";
    case ErrorCode::ProbabilityOutOfRange: return "ProbabilityOutOfRange";
    case ErrorCode::ProbabilitiesDontSumToOne: return "ProbabilitiesDontSumToOne";
    case ErrorCode::DuplicateState: return "DuplicateState";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::NumericOverflow: return "NumericOverflow";
    case ErrorCode::MalformedProgram: return "MalformedProgram";
    case ErrorCode::NotInPhi: return "NotInPhi";
    case ErrorCode::UndefinedRatio: return "UndefinedRatio";
    case ErrorCode::InvalidTriple: return "InvalidTriple";
    case ErrorCode::DecompositionNotInPhi: return "DecompositionNotInPhi";
    case ErrorCode::DeltaTooLargeForTargetRate: return "DeltaTooLargeForTargetRate";
    case ErrorCode::TraceTooShort: return "TraceTooShort";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Unsupported: return "Unsupported";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above, so
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace flpf
