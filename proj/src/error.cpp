#include "tonebias/error.hpp"

namespace tonebias {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidBounds: return "InvalidBounds";
    case ErrorCode::EmptyLexicon: return "EmptyLexicon";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::MissingScore: return "MissingScore";
    case ErrorCode::DuplicateScore: return "DuplicateScore";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::NegativeFeature: return "NegativeFeature";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::MissingCalibration: return "MissingCalibration";
    case ErrorCode::WeightSimplexViolation: return "WeightSimplexViolation";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InsufficientLabeled: return "InsufficientLabeled";
    case ErrorCode::NoConfidentLabels: return "NoConfidentLabels";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::HashMismatch: return "HashMismatch";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidSpec:
    case ErrorCode::InvalidBounds:
    case ErrorCode::InvalidConfig:
    case ErrorCode::OutOfRange:
    case ErrorCode::MalformedRecord:
    case ErrorCode::MalformedLine:
    case ErrorCode::DuplicateId:
    case ErrorCode::DuplicateScore:
    case ErrorCode::MissingScore:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::HashMismatch:
      return true;
    default:
      return false;
  }
}

}  // namespace tonebias
