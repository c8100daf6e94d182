#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "pgr/benchgen/benchgen.hpp"
#include "pgr/benchgen/synth.hpp"
#include "pgr/eval/harness.hpp"

using namespace pgr;
using nlohmann::json;

namespace {

PersonaProfile persona() {
  PersonaProfile p;
  p.user_id = "p1";
  p.demographics = "34, nurse, lives in Porto";
  p.domain_summaries = {{"health", "Training for a 10k."}, {"finance", "Saving for a flat."}};
  return p;
}

CandidateQuery candidate(int n_refs) {
  CandidateQuery c;
  c.query = "Help me plan next weekend";
  c.query_date = Date::parse_or_throw("2025-06-20");
  for (int i = 0; i < n_refs; ++i) {
    c.required_references.push_back({"r" + std::to_string(i + 1), "reference " + std::to_string(i + 1),
                                     Date::parse_or_throw("2025-06-0" + std::to_string(i + 2))});
  }
  return c;
}

json event(const std::string& date, std::optional<int> ref) {
  return {{"event_date", date},
          {"description", ref ? "talks about reference " + std::to_string(*ref) : "small talk"},
          {"embeds_reference", ref ? json(*ref) : json(nullptr)},
          {"is_filler", !ref}};
}

json turns(int n) {
  json t = json::array();
  for (int i = 0; i < n; ++i) t.push_back({{"speaker", i % 2 ? "agent" : "user"}, {"text", "line " + std::to_string(i)}});
  return t;
}

// Distinct vocabulary per candidate keeps passing candidates near zero
// similarity; failing ones repeat the query as every reference.
json candidate_json(int i, bool pass) {
  std::string q = "wq" + std::to_string(i) + " plan";
  json refs = json::array();
  for (int r = 0; r < 3; ++r) {
    refs.push_back({{"text", pass ? "zr" + std::to_string(i) + "x" + std::to_string(r) + " memory" : q},
                    {"date", "2025-05-1" + std::to_string(r)}});
  }
  return {{"query", q}, {"query_date", "2025-06-01"}, {"reasoning", "because"}, {"required_references", refs}};
}

}  // namespace

TEST_SUITE("benchgen") {

TEST_CASE("similarity filter") {
  HashingEmbedder e;
  auto same = similarity_filter(e, "Renew my passport", {"Renew my passport"}, 0.3);
  CHECK(same.avg == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_FALSE(same.keep);
  auto far = similarity_filter(e, "Renew my passport", {"bicycle chain grease", "violin lessons"}, 0.3);
  CHECK(std::abs(far.avg) < 0.2);
  CHECK(far.keep);
  CHECK_THROWS_AS(similarity_filter(e, "q", {}, 0.3), Error);
}

TEST_CASE("query generation: 12 of 20 pass, sorted by similarity") {
  json list = json::array();
  for (int i = 0; i < 20; ++i) list.push_back(candidate_json(i, i % 5 < 3));
  auto gw = test::scripted({{"BG-Q:p1", list.dump()}});
  auto out = generate_queries(*gw, HashingEmbedder(), persona(), {20, 15, 0.3});
  CHECK(out.proposed == 20);
  CHECK(out.filtered_out == 8);
  REQUIRE(out.kept.size() == 12);
  CHECK(std::is_sorted(out.kept.begin(), out.kept.end(),
                       [](const auto& a, const auto& b) { return a.avg_similarity < b.avg_similarity; }));
}

TEST_CASE("query generation: n_max keeps the lowest-similarity candidates") {
  json list = json::array();
  for (int i = 0; i < 18; ++i) list.push_back(candidate_json(i, true));
  auto gw = test::scripted({{"BG-Q:p1", list.dump()}});
  HashingEmbedder e;
  auto out = generate_queries(*gw, e, persona(), {18, 15, 0.3});
  REQUIRE(out.kept.size() == 15);
  std::vector<double> all;
  for (const auto& c : list) {
    std::vector<std::string> refs;
    for (const auto& r : c["required_references"]) refs.push_back(r["text"]);
    all.push_back(similarity_filter(e, c["query"], refs).avg);
  }
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < 15; ++i) CHECK(out.kept[i].avg_similarity == all[i]);
}

TEST_CASE("query generation: nothing passes") {
  json list = json::array();
  for (int i = 0; i < 4; ++i) list.push_back(candidate_json(i, false));
  auto gw = test::scripted({{"BG-Q:p1", list.dump()}});
  auto out = generate_queries(*gw, HashingEmbedder(), persona(), {});
  CHECK(out.kept.empty());
  CHECK(out.filtered_out == 4);
}

TEST_CASE("query generation: malformed candidates are skipped") {
  json list = json::array({candidate_json(1, true), {{"query", "no refs"}, {"query_date", "2025-06-01"}}});
  json two_refs = candidate_json(2, true);
  two_refs["required_references"].erase(0);
  list.push_back(two_refs);
  auto gw = test::scripted({{"BG-Q:p1", list.dump()}});
  auto out = generate_queries(*gw, HashingEmbedder(), persona(), {});
  CHECK(out.kept.size() == 1);
  CHECK(out.warnings.size() == 2);
}

TEST_CASE("timeline: three references, fillers around them") {
  auto c = candidate(3);
  json tl = json::array({event("2025-05-25", std::nullopt), event("2025-06-02", 1), event("2025-06-03", 2),
                         event("2025-06-04", 3), event("2025-06-10", std::nullopt)});
  auto gw = test::scripted({{"BG-T:x", tl.dump()}});
  auto events = synthesize_timeline(*gw, c, "BG-T:x");
  int refs = 0, fillers = 0;
  for (const auto& e : events) (e.embeds_reference ? refs : fillers)++;
  CHECK(refs == 3);
  CHECK(fillers >= 2);
}

TEST_CASE("timeline: valid 7-event timeline is ascending") {
  auto c = candidate(4);
  json tl = json::array({event("2025-05-22", std::nullopt), event("2025-06-02", 1), event("2025-06-03", 2),
                         event("2025-06-04", 3), event("2025-06-05", 4), event("2025-06-08", std::nullopt),
                         event("2025-06-12", std::nullopt)});
  auto gw = test::scripted({{"BG-T:x", tl.dump()}});
  auto events = synthesize_timeline(*gw, c, "BG-T:x");
  REQUIRE(events.size() == 7);
  for (std::size_t i = 1; i < events.size(); ++i) CHECK(events[i - 1].event_date < events[i].event_date);
}

TEST_CASE("timeline: out-of-order dates fail after the re-ask") {
  auto c = candidate(3);
  json tl = json::array({event("2025-05-25", std::nullopt), event("2025-06-04", 1), event("2025-06-02", 2),
                         event("2025-06-05", 3), event("2025-06-10", std::nullopt)});
  auto rec = std::make_shared<test::Recorder>();
  auto gw = test::recording(rec, {{"BG-T:x", {{"response", tl.dump()}}}});
  try {
    synthesize_timeline(*gw, c, "BG-T:x");
    FAIL("expected TimelineInvariantViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TimelineInvariantViolation);
  }
  CHECK(rec->requests.size() == 2);
}

TEST_CASE("timeline: lead window before the first reference") {
  auto c = candidate(3);
  auto events = [](const std::string& first) {
    return std::vector<TimelineEvent>{{Date::parse_or_throw(first), "f", std::nullopt, true},
                                      {Date::parse_or_throw("2025-06-02"), "a", 0, false},
                                      {Date::parse_or_throw("2025-06-03"), "b", 1, false},
                                      {Date::parse_or_throw("2025-06-04"), "c", 2, false},
                                      {Date::parse_or_throw("2025-06-09"), "f", std::nullopt, true}};
  };
  CHECK_NOTHROW(validate_timeline(events("2025-05-30"), c));   // 3 days
  CHECK_NOTHROW(validate_timeline(events("2025-05-19"), c));   // 14 days
  CHECK_THROWS_AS(validate_timeline(events("2025-05-31"), c), Error);
  CHECK_THROWS_AS(validate_timeline(events("2025-05-18"), c), Error);
}

TEST_CASE("dialogues: one log per event, turn counts in range") {
  std::vector<TimelineEvent> tl;
  std::vector<std::pair<std::string, std::string>> script;
  for (int i = 0; i < 6; ++i) {
    tl.push_back({Date::parse_or_throw("2025-06-0" + std::to_string(i + 1)), "event", i < 3 ? std::optional<int>(i) : std::nullopt, i >= 3});
    script.emplace_back("BG-D:x:" + std::to_string(i + 1), turns(5 + 5 * i).dump());
  }
  auto gw = test::scripted(script);
  auto out = expand_dialogues(*gw, tl, persona(), "p1-q1", "BG-D:x");
  CHECK(out.case_valid);
  REQUIRE(out.logs.size() == 6);
  for (const auto& l : out.logs) {
    CHECK(l.turns.size() >= 5);
    CHECK(l.turns.size() <= 30);
  }
  CHECK(out.logs[0].conversation_id == "p1-q1-e1");
}

TEST_CASE("dialogues: failing reference event invalidates the case") {
  std::vector<TimelineEvent> tl = {{Date::parse_or_throw("2025-06-01"), "filler", std::nullopt, true},
                                   {Date::parse_or_throw("2025-06-02"), "ref", 0, false}};
  auto gw = test::scripted({{"BG-D:x:1", turns(6).dump()}, {"BG-D:x:2", turns(3).dump()}});
  auto out = expand_dialogues(*gw, tl, persona(), "p1-q1", "BG-D:x");
  CHECK_FALSE(out.case_valid);
  CHECK(out.logs.size() == 1);
  CHECK(out.llm_calls == 3);
}

TEST_CASE("full LLM pipeline on a scripted profile") {
  json cands = json::array({candidate_json(1, true)});
  json tl = json::array({event("2025-05-01", std::nullopt), event("2025-05-10", 1), event("2025-05-11", 2),
                         event("2025-05-12", 3), event("2025-05-20", std::nullopt)});
  std::vector<std::pair<std::string, std::string>> script = {{"BG-Q:p1", cands.dump()}, {"BG-T:p1:1", tl.dump()}};
  for (int i = 1; i <= 5; ++i) script.emplace_back("BG-D:p1:1:" + std::to_string(i), turns(6).dump());
  auto gw = test::scripted(script);
  test::TempDir dir("llmbench");
  auto rep = build_llm_dataset(*gw, HashingEmbedder(), {persona()}, {}, dir.path());
  CHECK(rep.cases == 1);
  CHECK(rep.invalid_cases == 0);
  auto cases = read_cases(dir.path() / "users" / "p1" / "cases.jsonl");
  REQUIRE(cases.size() == 1);
  CHECK(cases[0].required_references.size() == 3);
  CHECK(read_conversations(dir.path() / "users" / "p1" / "conversations.jsonl").size() == 5);
}

TEST_CASE("synth world: same seed, identical files") {
  test::TempDir a("synth-a"), b("synth-b");
  write_synth_world(synth_world({4, 2, 50, 2}), a.path());
  write_synth_world(synth_world({4, 2, 50, 2}), b.path());
  for (const auto& e : std::filesystem::recursive_directory_iterator(a.path())) {
    if (!e.is_regular_file()) continue;
    auto rel = std::filesystem::relative(e.path(), a.path());
    CAPTURE(rel.string());
    CHECK(test::read_file(e.path()) == test::read_file(b.path() / rel));
  }
  CHECK(std::filesystem::exists(a.path() / "script.json"));
}

TEST_CASE("synth world: constructed gap between query-only and PGR") {
  SynthWorld w = synth_world({1, 5, 100, 3});
  auto gw = Gateway::scripted(w.script);
  PGRConfig base;
  double qo = 0, pgr = 0;
  int n = 0;
  for (const auto& u : w.users) {
    CHECK(u.store->fact_count() == 100);
    for (const auto& c : u.cases) {
      auto a = run_arm(arm_from_name("query-only", base), c, *u.store, *gw);
      auto b = run_arm(arm_from_name("pgr-tot", base), c, *u.store, *gw);
      qo += oracle_recall(c, a.fids).recall;
      pgr += oracle_recall(c, b.fids).recall;
      ++n;
    }
  }
  CHECK(n == 15);
  CHECK(qo / n < 0.5);
  CHECK(pgr / n == 1.0);
}

TEST_CASE("synth world: dataset loads back for evaluation") {
  test::TempDir dir("synth-load");
  SynthWorld w = synth_world({1, 2, 40, 2});
  write_synth_world(w, dir.path());
  auto gw = Gateway::scripted(w.script);
  auto users = load_dataset(dir.path(), gw->routed_embedder());
  REQUIRE(users.size() == 2);
  CHECK(users[0].store->same_contents(*w.users[0].store));
  CHECK(users[1].cases == w.users[1].cases);
}

}
