#include "pgr/core/error.hpp"

namespace pgr {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingPlaceholder: return "MissingPlaceholder";
    case ErrorCode::UnknownTemplate: return "UnknownTemplate";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::NoScriptMatch: return "NoScriptMatch";
    case ErrorCode::ProviderRefusal: return "ProviderRefusal";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NoJsonFound: return "NoJsonFound";
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::InvalidDate: return "InvalidDate";
    case ErrorCode::UnknownFid: return "UnknownFid";
    case ErrorCode::FrequencyRegression: return "FrequencyRegression";
    case ErrorCode::EmptyQuery: return "EmptyQuery";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::CorruptRecord: return "CorruptRecord";
    case ErrorCode::EmbedderMismatch: return "EmbedderMismatch";
    case ErrorCode::MergePromptFailure: return "MergePromptFailure";
    case ErrorCode::UnparseableAfterRetry: return "UnparseableAfterRetry";
    case ErrorCode::InvalidTree: return "InvalidTree";
    case ErrorCode::AckLengthMismatch: return "AckLengthMismatch";
    case ErrorCode::MissingGroundTruthIds: return "MissingGroundTruthIds";
    case ErrorCode::NoEvaluatedCases: return "NoEvaluatedCases";
    case ErrorCode::EmptyReferences: return "EmptyReferences";
    case ErrorCode::TimelineInvariantViolation: return "TimelineInvariantViolation";
    case ErrorCode::CaseInvalid: return "CaseInvalid";
    case ErrorCode::InfeasiblePlacement: return "InfeasiblePlacement";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {
std::string format_message(ErrorCode code, const std::string& detail) {
  std::string msg(to_string(code));
  if (!detail.empty()) {
    msg += ": ";
    msg += detail;
  }
  return msg;
}
}  // namespace

Error::Error(ErrorCode code, std::string detail)
    : std::runtime_error(format_message(code, detail)), code_(code), detail_(std::move(detail)) {}

bool is_gateway_failure(ErrorCode code) noexcept {
  return code == ErrorCode::TransportError || code == ErrorCode::NoScriptMatch ||
         code == ErrorCode::ProviderRefusal;
}

}  // namespace pgr
