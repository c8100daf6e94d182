#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pgr/core/date.hpp"
#include "pgr/gateway/gateway.hpp"
#include "pgr/memory/types.hpp"

namespace pgr {

/// Context line used when no facts were retrieved.
inline constexpr const char* kNoStoredFacts = "(no stored facts about the user)";

struct AnswerRecord {
  std::string query_id;
  std::string reasoning;
  std::string answer;
  bool used_summary = false;
  std::vector<std::string> fact_ids_in_context;
  int llm_calls = 0;
};

struct AnswerInputs {
  std::string query_id;
  std::string query;
  std::optional<Date> date;
  std::vector<FactPtr> facts;
  std::string summary;
  bool use_summary = true;
  /// Defaults to "ANS:<query_id>" when empty.
  std::string match_key;
};

/// The rendered answer prompt. The simulation-context slot is filled only
/// when use_summary is set and the summary is non-empty.
std::string render_answer_prompt(const AnswerInputs& in);

/// Throws Error{UnparseableAfterRetry}, or the gateway's error when the
/// backend itself failed.
AnswerRecord generate_answer(const Gateway& gateway, const AnswerInputs& in);

nlohmann::json to_json(const AnswerRecord& r);
AnswerRecord answer_from_json(const nlohmann::json& j);
/// Writes one record per line to `path`, replacing the file.
void write_answers(const std::vector<AnswerRecord>& records, const std::filesystem::path& path);
std::vector<AnswerRecord> read_answers(const std::filesystem::path& path);

}  // namespace pgr
