#include "pgr/extraction/extraction.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "pgr/gateway/prompt.hpp"
#include "pgr/memory/consolidation.hpp"

namespace pgr {

namespace {

json facts_for_prompt(const std::vector<FactPtr>& facts) {
  json out = json::array();
  for (const auto& f : facts) {
    out.push_back({{"fid", f->fid},
                   {"info", f->info},
                   {"type", std::string(to_string(f->fact_type))},
                   {"frequency", f->frequency},
                   {"related_entities", f->related_entities}});
  }
  return out;
}

// Parses one delta object; returns nullopt with `why` set when malformed.
std::optional<FactDelta> parse_delta(const json& j, std::string& why) {
  if (!j.is_object()) {
    why = "entry is not an object";
    return std::nullopt;
  }
  FactDelta d;
  try {
    d.fid = j.at("fid").is_string() ? j.at("fid").get<std::string>() : j.at("fid").dump();
    d.info = j.at("info").get<std::string>();
    auto type = parse_fact_type(j.at("type").get<std::string>());
    if (!type) {
      why = "invalid type";
      return std::nullopt;
    }
    d.fact_type = *type;
    d.frequency = j.at("frequency").get<int>();
    d.related_entities = j.value("related_entities", std::vector<std::string>{});
    const std::string state = j.at("state").get<std::string>();
    if (state == "add") {
      d.state = DeltaState::Add;
    } else if (state == "update") {
      d.state = DeltaState::Update;
    } else {
      why = "invalid state '" + state + "'";
      return std::nullopt;
    }
  } catch (const json::exception& e) {
    why = e.what();
    return std::nullopt;
  }
  return d;
}

}  // namespace

std::vector<FactPtr> select_existing_facts(const MemoryStore& store, const ConversationLog& log,
                                           const ExtractionOptions& options) {
  auto all = store.facts();
  if (all.size() <= options.full_store_limit) return all;
  std::vector<FactPtr> out;
  for (const auto& s : store.retrieve(log.transcript(), {static_cast<int>(options.subset_size), 0.0})) {
    out.push_back(s.fact);
  }
  return out;
}

ExtractionBatch extract_facts(const Gateway& gateway, const ConversationLog& log,
                              const std::vector<FactPtr>& existing) {
  ExtractionBatch batch;
  batch.conversation_id = log.conversation_id;

  const std::string prompt = render(TemplateId::MemoryCreate,
                                    {{"curr_facts", facts_for_prompt(existing).dump(2)},
                                     {"content", log.transcript()}});
  auto asked = ask_json<json>(gateway, prompt, "EXTRACT:" + log.conversation_id, [](const json& j) {
    if (!j.is_array()) throw Error(ErrorCode::MalformedJson, "expected a JSON list of facts");
    return j;
  });
  batch.llm_calls = asked.calls;
  if (!asked.raw_responses.empty()) batch.raw_response = asked.raw_responses.back();
  if (!asked.ok()) {
    if (asked.gateway_error) throw Error(*asked.gateway_error, asked.failure);
    throw Error(ErrorCode::UnparseableAfterRetry, "EXTRACT:" + log.conversation_id + ": " + asked.failure);
  }

  std::map<std::string, int> known;
  for (const auto& f : existing) known.emplace(f->fid, f->frequency);
  std::set<std::string> seen;

  for (const auto& item : *asked.value) {
    std::string why;
    auto delta = parse_delta(item, why);
    if (!delta) {
      batch.warnings.push_back("dropped malformed delta: " + why);
      continue;
    }
    if (delta->info.empty()) {
      batch.warnings.push_back("dropped delta " + delta->fid + ": empty info");
      continue;
    }
    if (delta->frequency < 1) {
      batch.warnings.push_back("dropped delta " + delta->fid + ": frequency < 1");
      continue;
    }
    if (!seen.insert(delta->fid).second) {
      batch.warnings.push_back("dropped delta " + delta->fid + ": duplicate fid in batch");
      continue;
    }
    if (delta->state == DeltaState::Add) {
      if (!delta->fid.starts_with("NEW_")) {
        batch.warnings.push_back("dropped add " + delta->fid + ": add ids must start with NEW_");
        continue;
      }
    } else {
      auto it = known.find(delta->fid);
      if (it == known.end()) {
        batch.warnings.push_back("dropped update " + delta->fid + ": unknown fid");
        continue;
      }
      if (delta->frequency <= it->second) {
        batch.warnings.push_back("dropped update " + delta->fid + ": frequency did not increase");
        continue;
      }
    }
    batch.deltas.push_back(std::move(*delta));
  }
  return batch;
}

PendingOutcome process_pending(MemoryStore& store, std::shared_ptr<const Gateway> gateway,
                               const PendingOptions& options) {
  if (options.cadence < 1) throw Error(ErrorCode::InvalidArgument, "cadence must be >= 1");
  PendingOutcome outcome;
  const auto pending = store.pending_conversations();
  if (pending.size() < static_cast<std::size_t>(options.cadence)) return outcome;
  outcome.ran = true;

  std::vector<ConversationLog> logs;
  for (const auto& id : pending) {
    if (auto log = store.find_conversation(id)) logs.push_back(std::move(*log));
  }
  std::stable_sort(logs.begin(), logs.end(), [](const ConversationLog& a, const ConversationLog& b) {
    if (a.session_date != b.session_date) return a.session_date < b.session_date;
    return a.conversation_id < b.conversation_id;
  });

  std::vector<std::string> done;
  for (const auto& log : logs) {
    json audit = {{"conversation_id", log.conversation_id}, {"session_date", log.session_date.to_string()}};
    try {
      ExtractionBatch batch = extract_facts(*gateway, log, select_existing_facts(store, log, options.extraction));
      UpsertReport report = store.upsert_facts(batch.deltas, log.conversation_id, log.session_date);
      audit["raw_response"] = batch.raw_response;
      audit["deltas"] = json::array();
      for (const auto& d : batch.deltas) audit["deltas"].push_back(to_json(d));
      audit["warnings"] = batch.warnings;
      audit["added"] = report.added;
      audit["updated"] = report.updated;
      audit["assigned"] = report.assigned;
      outcome.reports.push_back(std::move(report));
      outcome.batches.push_back(std::move(batch));
      done.push_back(log.conversation_id);
    } catch (const Error& e) {
      audit["error"] = e.what();
      outcome.failures.emplace_back(log.conversation_id, e.what());
    }
    if (options.audit) *options.audit << audit.dump() << '\n';
  }
  store.clear_pending(done);

  MergeReport merge = store.consolidate(options.consolidation, llm_fact_merger(gateway));
  if (merge.triggered) outcome.consolidation = std::move(merge);
  return outcome;
}

}  // namespace pgr
