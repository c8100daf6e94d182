#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pgr/core/date.hpp"
#include "pgr/gateway/embedding.hpp"

namespace pgr {

enum class FactType { Identity, Preference, Goal, Interest, Activity, Event };

std::string_view to_string(FactType t) noexcept;
std::optional<FactType> parse_fact_type(std::string_view s);

struct Fact {
  std::string fid;
  std::string info;
  FactType fact_type = FactType::Event;
  int frequency = 1;
  std::vector<std::string> related_entities;
  /// Provenance, kept sorted and unique.
  std::vector<std::string> conversation_ids;
  Date created_date;
  Date updated_date;
  EmbeddingVector embedding;
  std::vector<std::string> merged_fids;

  friend bool operator==(const Fact&, const Fact&) = default;
};

using FactPtr = std::shared_ptr<const Fact>;

enum class Speaker { User, Agent };

struct Turn {
  Speaker speaker = Speaker::User;
  std::string text;
  friend bool operator==(const Turn&, const Turn&) = default;
};

struct ConversationLog {
  std::string conversation_id;
  Date session_date;
  std::vector<Turn> turns;
  friend bool operator==(const ConversationLog&, const ConversationLog&) = default;

  /// "user: ...\nagent: ..." transcript used in prompts.
  std::string transcript() const;
};

/// Retrieval parameters: top `k` facts with cosine >= `tau`.
struct RetrievalParams {
  int k = 5;
  double tau = 0.3;

  /// Throws Error{InvalidArgument} unless k >= 1 and 0 <= tau <= 1.
  void validate() const;
};

struct ScoredFact {
  FactPtr fact;
  double score = 0.0;
};

enum class DeltaState { Add, Update };

/// One change proposed by fact extraction.
struct FactDelta {
  std::string fid;
  std::string info;
  FactType fact_type = FactType::Event;
  int frequency = 1;
  std::vector<std::string> related_entities;
  DeltaState state = DeltaState::Add;
};

// JSON codecs. Field names match the record files.
nlohmann::json to_json(const Fact& f);
Fact fact_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ConversationLog& log);
/// Throws Error{InvalidDate} for a bad session_date, Error{InvalidArgument}
/// for other schema problems.
ConversationLog conversation_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FactDelta& d);

/// `[date] [Type] info`, the line format used in every prompt and trace.
std::string format_fact_line(const Fact& f);
/// One fact line per entry, or `empty_marker` when there are none.
std::string format_fact_lines(const std::vector<FactPtr>& facts, const std::string& empty_marker);

}  // namespace pgr
