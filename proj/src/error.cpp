#include "krf/error.hpp"

namespace krf {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::InvalidProfile: return "InvalidProfile";
    case ErrorCode::NonPositiveC0: return "NonPositiveC0";
    case ErrorCode::DivergentIntegrand: return "DivergentIntegrand";
    case ErrorCode::NonPositiveH: return "NonPositiveH";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::StencilOutOfDomain: return "StencilOutOfDomain";
    case ErrorCode::IncompleteMetric: return "IncompleteMetric";
    case ErrorCode::StabilityViolation: return "StabilityViolation";
    case ErrorCode::BlowUp: return "BlowUp";
    case ErrorCode::TimeNotStored: return "TimeNotStored";
    case ErrorCode::BallOutOfDomain: return "BallOutOfDomain";
    case ErrorCode::NonPositiveEpsilon: return "NonPositiveEpsilon";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::InvalidC1Parameters: return "InvalidC1Parameters";
    case ErrorCode::NotC2: return "NotC2";
    case ErrorCode::NoKFound: return "NoKFound";
    case ErrorCode::DomainTooShort: return "DomainTooShort";
    case ErrorCode::NotC1OrC2: return "NotC1OrC2";
    case ErrorCode::XiAtOne: return "XiAtOne";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::CandidateCurvatureTooLarge: return "CandidateCurvatureTooLarge";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptSnapshot: return "CorruptSnapshot";
    case ErrorCode::Locked: return "Locked";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace krf
