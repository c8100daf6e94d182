#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pgr/benchgen/profile.hpp"
#include "pgr/eval/metrics.hpp"
#include "pgr/gateway/gateway.hpp"
#include "pgr/memory/types.hpp"

namespace pgr {

struct CandidateQuery {
  std::string query;
  Date query_date;
  std::string reasoning;
  std::vector<RequiredReference> required_references;
  double avg_similarity = 0.0;
};

struct FilterResult {
  double avg = 0.0;
  bool keep = false;
};

/// Mean cosine between the query and each reference; keep iff avg <= gamma.
/// Throws Error{EmptyReferences}.
FilterResult similarity_filter(const Embedder& embedder, const std::string& query,
                               const std::vector<std::string>& references, double gamma = 0.3);

struct QueryGenOptions {
  int n_candidates = 30;
  int n_max = 15;
  double gamma = 0.3;
};

struct QueryGenOutcome {
  std::vector<CandidateQuery> kept;
  int proposed = 0;
  int filtered_out = 0;
  std::vector<std::string> warnings;
  int llm_calls = 0;
};

/// Proposes candidates for `profile`, drops malformed ones and those above
/// gamma, and keeps the n_max lowest-similarity survivors in ascending order.
QueryGenOutcome generate_queries(const Gateway& gateway, const Embedder& embedder, const PersonaProfile& profile,
                                 const QueryGenOptions& options);

struct TimelineEvent {
  Date event_date;
  std::string description;
  /// Zero-based index into the candidate's references.
  std::optional<int> embeds_reference;
  bool is_filler = true;
};

/// Earliest-event offset before the first reference date, in days.
inline constexpr int kLeadMinDays = 3;
inline constexpr int kLeadMaxDays = 14;

/// Throws Error{TimelineInvariantViolation} naming the first violation.
void validate_timeline(const std::vector<TimelineEvent>& events, const CandidateQuery& candidate);

/// Throws Error{TimelineInvariantViolation} after one re-ask, or the gateway
/// error when the backend failed.
std::vector<TimelineEvent> synthesize_timeline(const Gateway& gateway, const CandidateQuery& candidate,
                                               const std::string& match_key);

struct DialogueOutcome {
  std::vector<ConversationLog> logs;
  std::vector<std::string> warnings;
  /// False when an event carrying a reference could not be expanded.
  bool case_valid = true;
  int llm_calls = 0;
};

/// One 5-30 turn log per event, ids "<id_prefix>-e<n>".
DialogueOutcome expand_dialogues(const Gateway& gateway, const std::vector<TimelineEvent>& timeline,
                                 const PersonaProfile& profile, const std::string& id_prefix,
                                 const std::string& key_prefix);

struct LlmBenchOptions {
  QueryGenOptions queries;
  int jobs = 1;
};

struct LlmBenchReport {
  int users = 0;
  int cases = 0;
  int invalid_cases = 0;
  std::vector<std::string> warnings;
};

/// The three-step pipeline over each profile, writing
/// users/<id>/{profile.json, conversations.jsonl, cases.jsonl} under `out`.
LlmBenchReport build_llm_dataset(const Gateway& gateway, const Embedder& embedder,
                                 const std::vector<PersonaProfile>& profiles, const LlmBenchOptions& options,
                                 const std::filesystem::path& out);

void write_conversations(const std::vector<ConversationLog>& logs, const std::filesystem::path& path);
std::vector<ConversationLog> read_conversations(const std::filesystem::path& path);

}  // namespace pgr
