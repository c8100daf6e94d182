#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pgr {

enum class ErrorCode {
  // gateway
  MissingPlaceholder,
  UnknownTemplate,
  TransportError,
  NoScriptMatch,
  ProviderRefusal,
  EmptyInput,
  NoJsonFound,
  MalformedJson,
  InvalidConfig,
  // memory store
  DuplicateId,
  InvalidDate,
  UnknownFid,
  FrequencyRegression,
  EmptyQuery,
  IoError,
  CorruptRecord,
  EmbedderMismatch,
  MergePromptFailure,
  // pipeline
  UnparseableAfterRetry,
  InvalidTree,
  AckLengthMismatch,
  MissingGroundTruthIds,
  NoEvaluatedCases,
  EmptyReferences,
  TimelineInvariantViolation,
  CaseInvalid,
  InfeasiblePlacement,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Domain error carrying a machine-checkable code. `detail` holds the
/// offending name, id, or position when one applies.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

/// True for failures that originate in the LLM/embedding service rather
/// than in the caller's data.
bool is_gateway_failure(ErrorCode code) noexcept;

}  // namespace pgr
