#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tonebias {

enum class ErrorCode {
  MalformedRecord,
  DuplicateId,
  InvalidSpec,
  IoError,
  InvalidBounds,
  EmptyLexicon,
  OutOfRange,
  MissingScore,
  DuplicateScore,
  EmptyCorpus,
  DimensionMismatch,
  MalformedLine,
  EmptyTable,
  NegativeFeature,
  SingleClass,
  NonFinite,
  MissingCalibration,
  WeightSimplexViolation,
  ArityMismatch,
  TooFewSamples,
  LengthMismatch,
  InsufficientLabeled,
  NoConfidentLabels,
  InvalidConfig,
  HashMismatch,
};

std::string_view to_string(ErrorCode code);

// Validation failures map to CLI exit code 1, everything else to 2.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tonebias
