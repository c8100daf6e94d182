#include "pgr/memory/consolidation.hpp"

#include "pgr/gateway/prompt.hpp"

namespace pgr {

std::string merge_match_key(const std::vector<FactPtr>& group) {
  std::string key = "MERGE:";
  for (std::size_t i = 0; i < group.size(); ++i) {
    if (i) key += '+';
    key += group[i]->fid;
  }
  return key;
}

FactMerger llm_fact_merger(std::shared_ptr<const Gateway> gateway) {
  return [gateway = std::move(gateway)](const std::vector<FactPtr>& group) -> MergeText {
    json inputs = json::array();
    for (const auto& f : group) {
      inputs.push_back({{"fid", f->fid},
                        {"info", f->info},
                        {"type", std::string(to_string(f->fact_type))},
                        {"frequency", f->frequency},
                        {"related_entities", f->related_entities},
                        {"conversation_ids", f->conversation_ids},
                        {"date", f->updated_date.to_string()}});
    }
    const std::string prompt = render(TemplateId::MemoryMerge, {{"facts_to_merge", inputs.dump(2)}});
    auto asked = ask_json<MergeText>(*gateway, prompt, merge_match_key(group), [](const json& j) {
      if (!j.is_object()) throw Error(ErrorCode::MalformedJson, "merged fact is not an object");
      MergeText t;
      t.info = j.at("info").get<std::string>();
      if (t.info.empty()) throw Error(ErrorCode::MalformedJson, "empty info");
      auto type = parse_fact_type(j.at("type").get<std::string>());
      if (!type) throw Error(ErrorCode::MalformedJson, "invalid type");
      t.fact_type = *type;
      t.related_entities = j.value("related_entities", std::vector<std::string>{});
      return t;
    });
    if (!asked.ok()) throw Error(ErrorCode::MergePromptFailure, merge_match_key(group) + ": " + asked.failure);
    return *asked.value;
  };
}

}  // namespace pgr
