#include "pgr/memory/types.hpp"

#include <algorithm>

#include "pgr/core/error.hpp"

namespace pgr {

using nlohmann::json;

std::string_view to_string(FactType t) noexcept {
  switch (t) {
    case FactType::Identity: return "Identity";
    case FactType::Preference: return "Preference";
    case FactType::Goal: return "Goal";
    case FactType::Interest: return "Interest";
    case FactType::Activity: return "Activity";
    case FactType::Event: return "Event";
  }
  return "Event";
}

std::optional<FactType> parse_fact_type(std::string_view s) {
  for (auto t : {FactType::Identity, FactType::Preference, FactType::Goal, FactType::Interest,
                 FactType::Activity, FactType::Event}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::string ConversationLog::transcript() const {
  std::string out;
  for (const auto& t : turns) {
    out += t.speaker == Speaker::User ? "user: " : "agent: ";
    out += t.text;
    out += '\n';
  }
  return out;
}

void RetrievalParams::validate() const {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  if (!(tau >= 0.0 && tau <= 1.0)) throw Error(ErrorCode::InvalidArgument, "tau must lie in [0, 1]");
}

json to_json(const Fact& f) {
  return json{{"fid", f.fid},
              {"info", f.info},
              {"fact_type", std::string(to_string(f.fact_type))},
              {"frequency", f.frequency},
              {"related_entities", f.related_entities},
              {"conversation_ids", f.conversation_ids},
              {"created_date", f.created_date.to_string()},
              {"updated_date", f.updated_date.to_string()},
              {"embedding", std::vector<double>(f.embedding.values().begin(), f.embedding.values().end())},
              {"merged_fids", f.merged_fids}};
}

Fact fact_from_json(const json& j) {
  Fact f;
  f.fid = j.at("fid").get<std::string>();
  f.info = j.at("info").get<std::string>();
  auto type = parse_fact_type(j.at("fact_type").get<std::string>());
  if (!type) throw Error(ErrorCode::InvalidArgument, "unknown fact_type for " + f.fid);
  f.fact_type = *type;
  f.frequency = j.at("frequency").get<int>();
  f.related_entities = j.value("related_entities", std::vector<std::string>{});
  f.conversation_ids = j.at("conversation_ids").get<std::vector<std::string>>();
  f.created_date = Date::parse_or_throw(j.at("created_date").get<std::string>());
  f.updated_date = Date::parse_or_throw(j.at("updated_date").get<std::string>());
  f.embedding = EmbeddingVector::from_stored(j.at("embedding").get<std::vector<double>>());
  f.merged_fids = j.value("merged_fids", std::vector<std::string>{});
  return f;
}

json to_json(const ConversationLog& log) {
  json turns = json::array();
  for (const auto& t : log.turns) {
    turns.push_back({{"speaker", t.speaker == Speaker::User ? "user" : "agent"}, {"text", t.text}});
  }
  return json{{"conversation_id", log.conversation_id},
              {"session_date", log.session_date.to_string()},
              {"turns", turns}};
}

ConversationLog conversation_from_json(const json& j) {
  ConversationLog log;
  try {
    log.conversation_id = j.at("conversation_id").get<std::string>();
    log.session_date = Date::parse_or_throw(j.at("session_date").get<std::string>());
    for (const auto& t : j.at("turns")) {
      Turn turn;
      const std::string speaker = t.at("speaker").get<std::string>();
      if (speaker == "user") {
        turn.speaker = Speaker::User;
      } else if (speaker == "agent" || speaker == "assistant") {
        turn.speaker = Speaker::Agent;
      } else {
        throw Error(ErrorCode::InvalidArgument, "unknown speaker '" + speaker + "'");
      }
      turn.text = t.at("text").get<std::string>();
      log.turns.push_back(std::move(turn));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, e.what());
  }
  return log;
}

json to_json(const FactDelta& d) {
  return json{{"fid", d.fid},
              {"info", d.info},
              {"type", std::string(to_string(d.fact_type))},
              {"frequency", d.frequency},
              {"related_entities", d.related_entities},
              {"state", d.state == DeltaState::Add ? "add" : "update"}};
}

std::string format_fact_line(const Fact& f) {
  return "[" + f.updated_date.to_string() + "] [" + std::string(to_string(f.fact_type)) + "] " + f.info;
}

std::string format_fact_lines(const std::vector<FactPtr>& facts, const std::string& empty_marker) {
  if (facts.empty()) return empty_marker;
  std::string out;
  for (std::size_t i = 0; i < facts.size(); ++i) {
    if (i) out += '\n';
    out += format_fact_line(*facts[i]);
  }
  return out;
}

}  // namespace pgr
