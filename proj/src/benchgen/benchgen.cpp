#include "pgr/benchgen/benchgen.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "pgr/core/parallel.hpp"
#include "pgr/gateway/prompt.hpp"

namespace pgr {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void timeline_violation(const std::string& why) {
  throw Error(ErrorCode::TimelineInvariantViolation, why);
}

std::optional<CandidateQuery> parse_candidate(const json& j, std::string& why) {
  CandidateQuery c;
  if (!j.is_object()) {
    why = "candidate is not an object";
    return std::nullopt;
  }
  if (!j.contains("query") || !j["query"].is_string() || j["query"].get<std::string>().empty()) {
    why = "candidate without query";
    return std::nullopt;
  }
  c.query = j["query"].get<std::string>();
  auto date = j.contains("query_date") && j["query_date"].is_string()
                  ? Date::parse(j["query_date"].get<std::string>())
                  : std::nullopt;
  if (!date) {
    why = "candidate '" + c.query + "' has no valid query_date";
    return std::nullopt;
  }
  c.query_date = *date;
  c.reasoning = j.contains("reasoning") && j["reasoning"].is_string() ? j["reasoning"].get<std::string>() : "";
  if (!j.contains("required_references") || !j["required_references"].is_array()) {
    why = "candidate '" + c.query + "' has no reference list";
    return std::nullopt;
  }
  int n = 0;
  for (const auto& r : j["required_references"]) {
    RequiredReference ref;
    ref.ref_id = "r" + std::to_string(++n);
    if (r.is_string()) {
      ref.text = r.get<std::string>();
    } else if (r.is_object() && r.contains("text") && r["text"].is_string()) {
      ref.text = r["text"].get<std::string>();
      if (r.contains("date") && r["date"].is_string()) {
        ref.date = Date::parse(r["date"].get<std::string>());
        if (!ref.date) {
          why = "candidate '" + c.query + "' has a reference with a bad date";
          return std::nullopt;
        }
        if (!(*ref.date < c.query_date)) {
          why = "candidate '" + c.query + "' has a reference dated on or after the query";
          return std::nullopt;
        }
      }
    }
    if (ref.text.empty()) {
      why = "candidate '" + c.query + "' has an empty reference";
      return std::nullopt;
    }
    c.required_references.push_back(std::move(ref));
  }
  if (n < 3 || n > 5) {
    why = "candidate '" + c.query + "' has " + std::to_string(n) + " references (need 3-5)";
    return std::nullopt;
  }
  return c;
}

std::vector<TimelineEvent> parse_timeline(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::MalformedJson, "timeline is not a list");
  std::vector<TimelineEvent> out;
  for (const auto& e : j) {
    if (!e.is_object()) throw Error(ErrorCode::MalformedJson, "event is not an object");
    TimelineEvent ev;
    auto date = e.contains("event_date") && e["event_date"].is_string()
                    ? Date::parse(e["event_date"].get<std::string>())
                    : std::nullopt;
    if (!date) throw Error(ErrorCode::MalformedJson, "event without a valid event_date");
    ev.event_date = *date;
    if (!e.contains("description") || !e["description"].is_string()) {
      throw Error(ErrorCode::MalformedJson, "event without description");
    }
    ev.description = e["description"].get<std::string>();
    if (e.contains("embeds_reference") && !e["embeds_reference"].is_null()) {
      if (!e["embeds_reference"].is_number_integer()) throw Error(ErrorCode::MalformedJson, "embeds_reference is not a number");
      ev.embeds_reference = e["embeds_reference"].get<int>() - 1;
    }
    ev.is_filler = e.contains("is_filler") && e["is_filler"].is_boolean() ? e["is_filler"].get<bool>()
                                                                          : !ev.embeds_reference.has_value();
    out.push_back(std::move(ev));
  }
  return out;
}

std::vector<Turn> parse_turns(const json& j) {
  const json* list = &j;
  if (j.is_object() && j.contains("turns")) list = &j["turns"];
  if (!list->is_array()) throw Error(ErrorCode::MalformedJson, "dialogue is not a list of turns");
  std::vector<Turn> turns;
  for (const auto& t : *list) {
    if (!t.is_object() || !t.contains("speaker") || !t.contains("text") || !t["text"].is_string()) {
      throw Error(ErrorCode::MalformedJson, "turn without speaker/text");
    }
    std::string sp = t["speaker"].get<std::string>();
    Turn turn;
    if (sp == "user") {
      turn.speaker = Speaker::User;
    } else if (sp == "agent" || sp == "assistant") {
      turn.speaker = Speaker::Agent;
    } else {
      throw Error(ErrorCode::MalformedJson, "unknown speaker '" + sp + "'");
    }
    turn.text = t["text"].get<std::string>();
    if (turn.text.empty()) throw Error(ErrorCode::MalformedJson, "empty turn");
    turns.push_back(std::move(turn));
  }
  if (turns.size() < 5 || turns.size() > 30) {
    throw Error(ErrorCode::MalformedJson, "dialogue has " + std::to_string(turns.size()) + " turns (need 5-30)");
  }
  return turns;
}

}  // namespace

FilterResult similarity_filter(const Embedder& embedder, const std::string& query,
                               const std::vector<std::string>& references, double gamma) {
  if (references.empty()) throw Error(ErrorCode::EmptyReferences, "similarity filter over zero references");
  std::vector<std::string> texts{query};
  texts.insert(texts.end(), references.begin(), references.end());
  auto vecs = embedder.embed(texts);
  double sum = 0.0;
  for (std::size_t i = 1; i < vecs.size(); ++i) sum += cosine(vecs[0], vecs[i]);
  FilterResult r;
  r.avg = sum / static_cast<double>(references.size());
  r.keep = r.avg <= gamma;
  return r;
}

QueryGenOutcome generate_queries(const Gateway& gateway, const Embedder& embedder, const PersonaProfile& profile,
                                 const QueryGenOptions& options) {
  QueryGenOutcome out;
  std::string prompt = render(TemplateId::BenchQuery, {{"n_candidates", std::to_string(options.n_candidates)},
                                                       {"demographics", profile.demographics},
                                                       {"domain_summaries", profile.domain_text()}});
  auto asked = ask_json<json>(gateway, prompt, "BG-Q:" + profile.user_id, [](const json& j) {
    const json* list = &j;
    if (j.is_object()) {
      list = nullptr;
      for (const auto& [k, v] : j.items()) {
        if (v.is_array()) list = &v;
      }
    }
    if (!list || !list->is_array()) throw Error(ErrorCode::MalformedJson, "expected a list of candidates");
    return *list;
  });
  out.llm_calls = asked.calls;
  if (!asked.ok()) {
    out.warnings.push_back(profile.user_id + ": query generation failed: " + asked.failure);
    return out;
  }
  std::vector<CandidateQuery> survivors;
  for (const auto& item : *asked.value) {
    ++out.proposed;
    std::string why;
    auto c = parse_candidate(item, why);
    if (!c) {
      out.warnings.push_back(profile.user_id + ": skipped candidate: " + why);
      continue;
    }
    std::vector<std::string> refs;
    for (const auto& r : c->required_references) refs.push_back(r.text);
    FilterResult f = similarity_filter(embedder, c->query, refs, options.gamma);
    c->avg_similarity = f.avg;
    if (!f.keep) {
      ++out.filtered_out;
      continue;
    }
    survivors.push_back(std::move(*c));
  }
  std::stable_sort(survivors.begin(), survivors.end(),
                   [](const CandidateQuery& a, const CandidateQuery& b) { return a.avg_similarity < b.avg_similarity; });
  if (static_cast<int>(survivors.size()) > options.n_max) survivors.resize(std::max(0, options.n_max));
  out.kept = std::move(survivors);
  return out;
}

void validate_timeline(const std::vector<TimelineEvent>& events, const CandidateQuery& candidate) {
  const int n = static_cast<int>(events.size());
  const int refs = static_cast<int>(candidate.required_references.size());
  if (n < 5 || n > 10) timeline_violation("timeline has " + std::to_string(n) + " events (need 5-10)");
  std::vector<int> embedded(refs, 0);
  int fillers = 0;
  for (int i = 0; i < n; ++i) {
    const auto& e = events[i];
    if (e.description.empty()) timeline_violation("event " + std::to_string(i + 1) + " has no description");
    if (i > 0 && e.event_date < events[i - 1].event_date) {
      timeline_violation("event " + std::to_string(i + 1) + " is dated before its predecessor");
    }
    if (!(e.event_date < candidate.query_date)) {
      timeline_violation("event " + std::to_string(i + 1) + " is not before the query date");
    }
    if (e.embeds_reference) {
      if (e.is_filler) timeline_violation("event " + std::to_string(i + 1) + " is a filler carrying a reference");
      int r = *e.embeds_reference;
      if (r < 0 || r >= refs) timeline_violation("event " + std::to_string(i + 1) + " names a missing reference");
      ++embedded[r];
    } else {
      if (!e.is_filler) timeline_violation("event " + std::to_string(i + 1) + " is neither filler nor reference");
      ++fillers;
    }
  }
  for (int r = 0; r < refs; ++r) {
    if (embedded[r] != 1) {
      timeline_violation("reference " + std::to_string(r + 1) + " is embedded " + std::to_string(embedded[r]) +
                         " times");
    }
  }
  if (fillers < 2) timeline_violation("timeline has fewer than 2 filler events");
  std::optional<Date> earliest;
  for (const auto& r : candidate.required_references) {
    if (r.date && (!earliest || *r.date < *earliest)) earliest = r.date;
  }
  if (earliest) {
    int lead = static_cast<int>(days_between(events.front().event_date, *earliest));
    if (lead < kLeadMinDays || lead > kLeadMaxDays) {
      timeline_violation("first event is " + std::to_string(lead) + " days before the earliest reference (need " +
                         std::to_string(kLeadMinDays) + "-" + std::to_string(kLeadMaxDays) + ")");
    }
  }
}

std::vector<TimelineEvent> synthesize_timeline(const Gateway& gateway, const CandidateQuery& candidate,
                                               const std::string& match_key) {
  std::string prompt = render(TemplateId::BenchTimeline, {{"query_date", candidate.query_date.to_string()},
                                                          {"query", candidate.query},
                                                          {"refs_list", format_references(candidate.required_references)}});
  auto asked = ask_json<std::vector<TimelineEvent>>(gateway, prompt, match_key, [&](const json& j) {
    auto events = parse_timeline(j);
    validate_timeline(events, candidate);
    return events;
  });
  if (asked.ok()) return std::move(*asked.value);
  if (asked.gateway_error) throw Error(*asked.gateway_error, asked.failure);
  throw Error(ErrorCode::TimelineInvariantViolation, asked.failure);
}

DialogueOutcome expand_dialogues(const Gateway& gateway, const std::vector<TimelineEvent>& timeline,
                                 const PersonaProfile& profile, const std::string& id_prefix,
                                 const std::string& key_prefix) {
  DialogueOutcome out;
  for (std::size_t i = 0; i < timeline.size(); ++i) {
    const auto& ev = timeline[i];
    std::string prompt = render(TemplateId::BenchDialogue, {{"event_date", ev.event_date.to_string()},
                                                            {"demographics", profile.demographics},
                                                            {"domain_summaries", profile.domain_text()},
                                                            {"description", ev.description}});
    auto asked = ask_json<std::vector<Turn>>(gateway, prompt, key_prefix + ":" + std::to_string(i + 1), parse_turns);
    out.llm_calls += asked.calls;
    if (!asked.ok()) {
      out.warnings.push_back(id_prefix + " event " + std::to_string(i + 1) + ": " + asked.failure);
      if (ev.embeds_reference) out.case_valid = false;
      continue;
    }
    ConversationLog log;
    log.conversation_id = id_prefix + "-e" + std::to_string(i + 1);
    log.session_date = ev.event_date;
    log.turns = std::move(*asked.value);
    out.logs.push_back(std::move(log));
  }
  return out;
}

void write_conversations(const std::vector<ConversationLog>& logs, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (const auto& l : logs) out << to_json(l).dump() << '\n';
}

std::vector<ConversationLog> read_conversations(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::vector<ConversationLog> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(conversation_from_json(json::parse(line)));
    } catch (const json::exception&) {
      throw Error(ErrorCode::CorruptRecord, path.filename().string() + ":" + std::to_string(n));
    } catch (const Error& e) {
      throw Error(ErrorCode::CorruptRecord, path.filename().string() + ":" + std::to_string(n) + " " + e.detail());
    }
  }
  return out;
}

LlmBenchReport build_llm_dataset(const Gateway& gateway, const Embedder& embedder,
                                 const std::vector<PersonaProfile>& profiles, const LlmBenchOptions& options,
                                 const fs::path& out_dir) {
  struct UserOut {
    std::vector<ConversationLog> logs;
    std::vector<QueryCase> cases;
    std::vector<std::string> warnings;
    int invalid = 0;
  };
  std::vector<UserOut> results(profiles.size());
  parallel_for(profiles.size(), options.jobs, [&](std::size_t u) {
    const auto& profile = profiles[u];
    UserOut& res = results[u];
    QueryGenOutcome q = generate_queries(gateway, embedder, profile, options.queries);
    res.warnings = q.warnings;
    for (std::size_t qi = 0; qi < q.kept.size(); ++qi) {
      const auto& cand = q.kept[qi];
      std::string tag = profile.user_id + ":" + std::to_string(qi + 1);
      std::string case_id = profile.user_id + "-q" + std::to_string(qi + 1);
      std::vector<TimelineEvent> timeline;
      try {
        timeline = synthesize_timeline(gateway, cand, "BG-T:" + tag);
      } catch (const Error& e) {
        res.warnings.push_back(case_id + ": timeline failed: " + e.what());
        ++res.invalid;
        continue;
      }
      DialogueOutcome d = expand_dialogues(gateway, timeline, profile, case_id, "BG-D:" + tag);
      res.warnings.insert(res.warnings.end(), d.warnings.begin(), d.warnings.end());
      if (!d.case_valid) {
        res.warnings.push_back(case_id + ": a reference-bearing dialogue failed; case dropped");
        ++res.invalid;
        continue;
      }
      res.logs.insert(res.logs.end(), d.logs.begin(), d.logs.end());
      QueryCase c;
      c.query_id = case_id;
      c.user_id = profile.user_id;
      c.query = cand.query;
      c.query_date = cand.query_date;
      c.required_references = cand.required_references;
      res.cases.push_back(std::move(c));
    }
  });

  LlmBenchReport report;
  for (std::size_t u = 0; u < profiles.size(); ++u) {
    fs::path dir = out_dir / "users" / profiles[u].user_id;
    write_profile(profiles[u], dir / "profile.json");
    write_conversations(results[u].logs, dir / "conversations.jsonl");
    write_cases(results[u].cases, dir / "cases.jsonl");
    ++report.users;
    report.cases += static_cast<int>(results[u].cases.size());
    report.invalid_cases += results[u].invalid;
    report.warnings.insert(report.warnings.end(), results[u].warnings.begin(), results[u].warnings.end());
  }
  return report;
}

}  // namespace pgr
