#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace krf {

enum class ErrorCode {
  InvalidGrid,
  InvalidProfile,
  NonPositiveC0,
  DivergentIntegrand,
  NonPositiveH,
  OutOfDomain,
  GridMismatch,
  DimensionTooSmall,
  StencilOutOfDomain,
  IncompleteMetric,
  StabilityViolation,
  BlowUp,
  TimeNotStored,
  BallOutOfDomain,
  NonPositiveEpsilon,
  InvalidK,
  InvalidC1Parameters,
  NotC2,
  NoKFound,
  DomainTooShort,
  NotC1OrC2,
  XiAtOne,
  HypothesisViolated,
  CandidateCurvatureTooLarge,
  UnknownPreset,
  InvalidParams,
  ParseError,
  UnknownKey,
  OutOfRange,
  IoError,
  VersionMismatch,
  CorruptSnapshot,
  Locked,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace krf
