#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pgr/core/date.hpp"
#include "pgr/core/error.hpp"
#include "pgr/gateway/gateway.hpp"

namespace pgr {

struct RequiredReference {
  std::string ref_id;
  std::string text;
  std::optional<Date> date;
  friend bool operator==(const RequiredReference&, const RequiredReference&) = default;
};

struct QueryCase {
  std::string query_id;
  std::string user_id;
  std::string query;
  Date query_date;
  std::vector<RequiredReference> required_references;
  /// Fixture worlds only: reference_fact_ids[n] is the fid of reference n.
  std::optional<std::vector<std::string>> reference_fact_ids;
  friend bool operator==(const QueryCase&, const QueryCase&) = default;

  /// Throws Error{CaseInvalid}.
  void validate() const;
};

nlohmann::json to_json(const QueryCase& c);
/// Throws Error{CaseInvalid} or Error{InvalidDate}.
QueryCase query_case_from_json(const nlohmann::json& j);
std::vector<QueryCase> read_cases(const std::filesystem::path& path);
void write_cases(const std::vector<QueryCase>& cases, const std::filesystem::path& path);

/// Numbered reference list as shown to judges: "1. [date] text" per line.
std::string format_references(const std::vector<RequiredReference>& refs);

struct RefJudgment {
  std::string ref_id;
  bool present = false;
  std::string reason;
};

struct RecallResult {
  std::string query_id;
  std::vector<RefJudgment> per_ref;
  double recall = 0.0;
  int recall_exact = 0;
  /// False when the judge could not produce a usable verdict.
  bool evaluated = true;
  std::optional<ErrorCode> error;
  std::string error_detail;
  int llm_calls = 0;
};

/// Fills recall and recall_exact from per_ref.
RecallResult make_recall(std::string query_id, std::vector<RefJudgment> per_ref);

struct AckEntry {
  bool present = false;
  std::string reason;
};
/// Parses one "n. Yes. reason" item. Throws Error{MalformedJson}.
AckEntry parse_ack_entry(const std::string& item);

/// LLM-judged recall. A second ack-length mismatch or parse failure leaves
/// the result unevaluated with `error` set; this never throws for judge
/// failures.
RecallResult judge_recall(const Gateway& judge, const QueryCase& c, const std::string& retrieved_context,
                          const std::string& match_key);

/// Membership of reference_fact_ids in `retrieved_fact_ids`. Throws
/// Error{MissingGroundTruthIds}.
RecallResult oracle_recall(const QueryCase& c, const std::vector<std::string>& retrieved_fact_ids);

enum class PairChoice { First, Second, Tie };
std::string_view to_string(PairChoice c) noexcept;

struct PairPass {
  /// True when response A was shown first.
  bool a_first = true;
  std::string first_label;
  std::string second_label;
  std::optional<PairChoice> choice;
  std::string reasoning;
  double credit_for_a = 0.0;
  bool valid = false;
  std::string error;
};

struct PairwiseOutcome {
  std::string query_id;
  std::string arm_a;
  std::string arm_b;
  std::array<PairPass, 2> passes;
  double credit_for_a = 0.0;
  /// One or both passes failed; the outcome is left out of the win rate.
  bool partial = false;
  int llm_calls = 0;
};

inline constexpr double kTieCredit = 0.5;

/// Credit for A of one pass given the judge's pick.
double pass_credit(bool a_first, PairChoice choice);

/// Opaque 4-character labels for a pass, distinct from each other and
/// derived deterministically from (query_id, pass).
std::pair<std::string, std::string> pair_labels(const std::string& query_id, int pass);

struct PairContext {
  std::string persona_text;
  std::string facts_text;
  std::optional<Date> date;
  /// Required references or other ground truth shown to the judge; empty to
  /// omit the section.
  std::string ground_truth;
  std::string arm_a = "A";
  std::string arm_b = "B";
};

std::string pair_match_key(const PairContext& ctx, const std::string& query_id, int pass);

/// Two passes: (A, B) then (B, A), each with fresh labels.
/// Throws Error{InvalidArgument} for empty responses.
PairwiseOutcome judge_pair(const Gateway& judge, const QueryCase& c, const std::string& response_a,
                           const std::string& response_b, const PairContext& ctx);

/// Builds an outcome from per-pass choices (nullopt marks an invalid pass).
PairwiseOutcome make_pairwise(std::string query_id, std::optional<PairChoice> pass0, std::optional<PairChoice> pass1);

struct Report {
  int n = 0;
  int unevaluated = 0;
  double mean_recall = 0.0;
  double mean_recall_exact = 0.0;
  bool has_recall = false;
  int n_pairwise = 0;
  int unevaluated_pairwise = 0;
  double win_rate_percent = 0.0;
  bool has_pairwise = false;
};

/// Means over evaluated cases only. Throws Error{NoEvaluatedCases} when
/// neither list holds an evaluated entry.
Report aggregate(const std::vector<RecallResult>& recalls, const std::vector<PairwiseOutcome>& pairs = {});

nlohmann::json to_json(const Report& r);
nlohmann::json to_json(const RecallResult& r);
nlohmann::json to_json(const PairwiseOutcome& o);

}  // namespace pgr
