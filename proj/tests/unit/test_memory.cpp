#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>

#include "fixtures.hpp"
#include "pgr/memory/consolidation.hpp"
#include "pgr/memory/store.hpp"

using namespace pgr;
using nlohmann::json;

namespace {

ConversationLog log_of(const std::string& id, const std::string& date) {
  return {id, Date::parse_or_throw(date), {{Speaker::User, "hello"}, {Speaker::Agent, "hi"}}};
}

FactDelta add(const std::string& tmp, const std::string& info, int freq = 1) {
  FactDelta d;
  d.fid = tmp;
  d.info = info;
  d.frequency = freq;
  d.state = DeltaState::Add;
  return d;
}

// Independent scan: long-double dot products straight from the fact
// vectors, full sort by (score desc, fid asc), then threshold and cut.
std::vector<std::pair<std::string, double>> oracle_scan(const MemoryStore& store, const EmbeddingVector& q,
                                                        const RetrievalParams& p) {
  std::vector<std::pair<std::string, double>> all;
  for (const auto& f : store.facts()) {
    long double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < q.dimension(); ++i) {
      dot += static_cast<long double>(q.values()[i]) * f->embedding.values()[i];
      na += static_cast<long double>(q.values()[i]) * q.values()[i];
      nb += static_cast<long double>(f->embedding.values()[i]) * f->embedding.values()[i];
    }
    double s = (na == 0 || nb == 0) ? 0.0 : static_cast<double>(dot / std::sqrt(na * nb));
    all.emplace_back(f->fid, s);
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::pair<std::string, double>> out;
  for (const auto& e : all) {
    if (static_cast<int>(out.size()) == p.k) break;
    if (e.second >= p.tau - 1e-12) out.push_back(e);
  }
  return out;
}

MergeText concat_merger(const std::vector<FactPtr>& group) {
  return {group.front()->info, group.front()->fact_type, {}};
}

}  // namespace

TEST_SUITE("memory") {

TEST_CASE("conversation logs: add, duplicate, pending") {
  MemoryStore s(test::hashing());
  s.add_conversation(log_of("c1", "2025-01-01"));
  CHECK(s.conversation_count() == 1);
  CHECK(s.fact_count() == 0);
  try {
    s.add_conversation(log_of("c1", "2025-01-02"));
    FAIL("expected DuplicateId");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DuplicateId);
  }
  CHECK(s.conversation_count() == 1);
  CHECK(s.find_conversation("c1")->session_date.to_string() == "2025-01-01");
  s.add_conversation(log_of("c2", "2025-01-02"));
  s.add_conversation(log_of("c3", "2025-01-03"));
  CHECK(s.pending_conversations().size() == 3);
  CHECK_THROWS_AS(s.add_conversation({"c4", Date::parse_or_throw("2025-01-04"), {}}), Error);
}

TEST_CASE("upsert: add then update increments frequency and provenance") {
  MemoryStore s(test::hashing());
  s.add_conversation(log_of("c1", "2025-01-01"));
  s.add_conversation(log_of("c2", "2025-01-05"));
  auto r1 = s.upsert_facts({add("NEW_1", "User is training for a half marathon")}, "c1", Date::parse_or_throw("2025-01-01"));
  CHECK(r1.added == 1);
  std::string fid = r1.assigned.at("NEW_1");
  auto f = s.find_fact(fid);
  CHECK(f->frequency == 1);
  CHECK(f->conversation_ids == std::vector<std::string>{"c1"});
  CHECK(f->created_date == f->updated_date);
  CHECK(f->embedding == test::hashing()->embed_one(f->info));

  FactDelta up = add(fid, "User is training for a half marathon in April", 2);
  up.state = DeltaState::Update;
  auto r2 = s.upsert_facts({up}, "c2", Date::parse_or_throw("2025-01-05"));
  CHECK(r2.updated == 1);
  f = s.find_fact(fid);
  CHECK(f->frequency == 2);
  CHECK(f->conversation_ids.size() == 2);
  CHECK(f->info == "User is training for a half marathon in April");
  CHECK(f->created_date.to_string() == "2025-01-01");
  CHECK(f->updated_date.to_string() == "2025-01-05");
  CHECK(s.new_fact_counter() == 1);
}

TEST_CASE("upsert: empty delta list is a no-op") {
  auto s = test::make_store({{"User likes tea"}});
  auto r = s->upsert_facts({}, "c1", Date::parse_or_throw("2025-01-01"));
  CHECK(r.added == 0);
  CHECK(r.updated == 0);
  CHECK(s->fact_count() == 1);
}

TEST_CASE("upsert: unknown fid rejects the whole batch") {
  auto s = test::make_store({{"User likes tea"}});
  FactDelta bad = add("f999999", "ghost", 2);
  bad.state = DeltaState::Update;
  try {
    s->upsert_facts({add("NEW_1", "User likes coffee"), bad}, "c1", Date::parse_or_throw("2025-01-02"));
    FAIL("expected UnknownFid");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownFid);
  }
  CHECK(s->fact_count() == 1);
  CHECK(s->new_fact_counter() == 0);
}

TEST_CASE("upsert: frequency may not go down") {
  auto s = test::make_store({{"User likes tea", "2025-01-01", 3}});
  FactDelta d = add("f000001", "User likes tea", 2);
  d.state = DeltaState::Update;
  try {
    s->upsert_facts({d}, "c1", Date::parse_or_throw("2025-01-02"));
    FAIL("expected FrequencyRegression");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FrequencyRegression);
  }
}

TEST_CASE("retrieve: empty store, self retrieval, empty query") {
  MemoryStore empty(test::hashing());
  CHECK(empty.retrieve("anything", {5, 0.3}).empty());
  auto s = test::make_store({{"User adopted a greyhound named Pixel"}, {"User works night shifts"}});
  auto hits = s->retrieve("User adopted a greyhound named Pixel", {1, 0.3});
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].fact->fid == "f000001");
  CHECK(hits[0].score == doctest::Approx(1.0).epsilon(1e-9));
  try {
    s->retrieve("   ", {1, 0.3});
    FAIL("expected EmptyQuery");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyQuery);
  }
}

TEST_CASE("retrieve: 50-fact store matches the exhaustive oracle") {
  std::mt19937_64 rng(50);
  std::vector<test::FactSpec> specs;
  for (int i = 0; i < 50; ++i) specs.push_back({test::random_text(rng, 2, 6)});
  auto s = test::make_store(specs);
  for (int trial = 0; trial < 40; ++trial) {
    auto qtext = test::random_text(rng, 1, 4);
    auto q = test::hashing()->embed_one(qtext);
    RetrievalParams p{5, 0.3};
    auto got = s->retrieve(qtext, p);
    auto want = oracle_scan(*s, q, p);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].fact->fid == want[i].first);
      CHECK(std::abs(got[i].score - want[i].second) <= 1e-9);
    }
  }
}

TEST_CASE("retrieve: equal cosines tie on fid even when the double scores differ") {
  // Grid vectors whose cosines with q are both 1/sqrt(3), but
  // dot / sqrt(|q|^2 |v|^2) rounds them one ulp apart.
  struct Fixed3 : Embedder {
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& t) const override {
      return std::vector<EmbeddingVector>(t.size(), EmbeddingVector::from_stored({0.125, 0.125, 0.125}));
    }
    std::size_t dimension() const override { return 3; }
    std::string id() const override { return "fixed3"; }
  };
  MemoryStore s(std::make_shared<Fixed3>());
  s.add_conversation(log_of("c1", "2025-01-01"));
  auto put = [&](const std::string& fid, std::vector<double> v) {
    Fact f;
    f.fid = fid;
    f.info = fid;
    f.conversation_ids = {"c1"};
    f.created_date = f.updated_date = Date::parse_or_throw("2025-01-01");
    f.embedding = EmbeddingVector::from_stored(std::move(v));
    s.insert_fact(std::move(f));
  };
  put("f000001", {-0.125, 0.25, 0.25});
  put("f000002", {0.0, 0.0, 0.125});
  auto hits = s.retrieve("q", {2, 0.0});
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].score < hits[1].score);
  CHECK(hits[0].fact->fid == "f000001");
  CHECK(std::abs(hits[0].score - hits[1].score) < 1e-15);
}

TEST_CASE("consolidate: identical facts a day apart merge with summed frequency") {
  auto s = test::make_store({{"User drinks oat milk lattes", "2025-02-01", 2},
                             {"User drinks oat milk lattes", "2025-02-02", 3},
                             {"User owns a red bicycle", "2025-02-02", 1}});
  ConsolidationParams p;
  p.force = true;
  auto r = s->consolidate(p, concat_merger);
  CHECK(r.triggered);
  CHECK(r.groups_merged == 1);
  CHECK(r.facts_removed == 2);
  CHECK(s->fact_count() == 2);
  auto m = s->find_fact(r.merged.at(0).fid);
  REQUIRE(m);
  CHECK(m->frequency == 5);
  CHECK(m->merged_fids == std::vector<std::string>{"f000001", "f000002"});
  CHECK(m->conversation_ids == std::vector<std::string>{"c1", "c2"});
  CHECK(m->created_date.to_string() == "2025-02-01");
  CHECK(m->updated_date.to_string() == "2025-02-02");
}

TEST_CASE("consolidate: facts outside the window stay apart") {
  auto s = test::make_store({{"User drinks oat milk lattes", "2025-01-01"}, {"User drinks oat milk lattes", "2025-01-31"}});
  ConsolidationParams p;
  p.force = true;
  p.window_days = 7;
  auto r = s->consolidate(p, concat_merger);
  CHECK(r.groups_merged == 0);
  CHECK(s->fact_count() == 2);
}

TEST_CASE("consolidate: provenance equals an independent set union") {
  auto s = test::make_store({{"User is learning Portuguese verbs", "2025-03-01"},
                             {"User is learning Portuguese verbs", "2025-03-03"},
                             {"User is learning Portuguese verbs", "2025-03-05"},
                             {"User keeps bees on the roof", "2025-03-05"}});
  std::set<std::string> expect;
  for (const auto& f : s->facts()) {
    if (f->info.find("Portuguese") != std::string::npos) expect.insert(f->conversation_ids.begin(), f->conversation_ids.end());
  }
  ConsolidationParams p;
  p.force = true;
  auto r = s->consolidate(p, concat_merger);
  REQUIRE(r.groups_merged == 1);
  auto m = s->find_fact(r.merged[0].fid);
  CHECK(std::set<std::string>(m->conversation_ids.begin(), m->conversation_ids.end()) == expect);
  CHECK(m->merged_fids.size() == 3);
}

TEST_CASE("consolidate: below the trigger nothing happens") {
  MemoryStore s(test::hashing());
  s.add_conversation(log_of("c1", "2025-01-01"));
  s.upsert_facts({add("NEW_1", "User plays chess"), add("NEW_2", "User plays chess")}, "c1", Date::parse_or_throw("2025-01-01"));
  auto r = s.consolidate({}, concat_merger);
  CHECK_FALSE(r.triggered);
  CHECK(s.fact_count() == 2);
}

TEST_CASE("consolidate: failed merge prompt leaves the group intact") {
  auto s = test::make_store({{"User drinks oat milk lattes", "2025-02-01"}, {"User drinks oat milk lattes", "2025-02-02"}});
  ConsolidationParams p;
  p.force = true;
  auto gw = test::scripted({{"MERGE:f000001+f000002", "no json here"}});
  auto r = s->consolidate(p, llm_fact_merger(gw));
  CHECK(r.groups_merged == 0);
  CHECK(r.failed_groups.size() == 1);
  CHECK(s->fact_count() == 2);
}

TEST_CASE("consolidate: LLM merger output is used") {
  auto s = test::make_store({{"User drinks oat milk lattes", "2025-02-01"}, {"User drinks oat milk lattes", "2025-02-02"}});
  ConsolidationParams p;
  p.force = true;
  auto gw = test::scripted(
      {{"MERGE:f000001+f000002", R"({"info": "User regularly drinks oat milk lattes", "type": "Preference", "frequency": 2})"}});
  auto r = s->consolidate(p, llm_fact_merger(gw));
  REQUIRE(r.groups_merged == 1);
  auto m = s->find_fact(r.merged[0].fid);
  CHECK(m->info == "User regularly drinks oat milk lattes");
  CHECK(m->fact_type == FactType::Preference);
}

TEST_CASE("persistence round trip") {
  std::mt19937_64 rng(9);
  std::vector<test::FactSpec> specs;
  for (int i = 0; i < 30; ++i) specs.push_back({test::random_text(rng, 3, 8), "2025-01-0" + std::to_string(1 + i % 9), 1 + i % 3});
  auto s = test::make_store(specs);
  s->add_conversation(log_of("pending-1", "2025-02-01"));
  test::TempDir dir("roundtrip");
  s->save(dir.path());
  auto back = MemoryStore::load(dir.path(), test::hashing());
  CHECK(back->same_contents(*s));
  CHECK(back->pending_conversations() == s->pending_conversations());
  auto a = s->retrieve("apple river", {5, 0.1});
  auto b = back->retrieve("apple river", {5, 0.1});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].fact->fid == b[i].fact->fid);
}

TEST_CASE("persistence: truncated line reports its line number") {
  auto s = test::make_store({{"one fact"}, {"two fact"}, {"three fact"}});
  test::TempDir dir("corrupt");
  s->save(dir.path());
  auto text = test::read_file(dir.path() / "facts.jsonl");
  auto second = text.find('\n') + 1;
  auto third = text.find('\n', second);
  std::string broken = text.substr(0, second) + text.substr(second, (third - second) / 2) + "\n" + text.substr(third + 1);
  std::ofstream(dir.path() / "facts.jsonl", std::ios::binary) << broken;
  try {
    MemoryStore::load(dir.path(), test::hashing());
    FAIL("expected CorruptRecord");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CorruptRecord);
    CHECK(e.detail().find("facts.jsonl:2") != std::string::npos);
  }
}

TEST_CASE("persistence: another embedder is rejected") {
  auto s = test::make_store({{"one fact"}});
  test::TempDir dir("mismatch");
  s->save(dir.path());
  try {
    MemoryStore::load(dir.path(), std::make_shared<HashingEmbedder>(128));
    FAIL("expected EmbedderMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmbedderMismatch);
  }
}

TEST_CASE("persistence: 1,000 facts load in under a second") {
  std::mt19937_64 rng(1000);
  std::vector<test::FactSpec> specs;
  for (int i = 0; i < 1000; ++i) specs.push_back({test::random_text(rng, 4, 12), "2025-0" + std::to_string(1 + i % 9) + "-15"});
  auto s = test::make_store(specs);
  test::TempDir dir("big");
  s->save(dir.path());
  auto t0 = std::chrono::steady_clock::now();
  auto back = MemoryStore::load(dir.path(), test::hashing());
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  MESSAGE("load time ", secs, " s");
  CHECK(back->same_contents(*s));
  CHECK(secs < 1.0);
}

TEST_CASE("format_fact_line uses [date] [Type] info") {
  auto s = test::make_store({{"User likes tea", "2025-01-01", 1, FactType::Preference}});
  CHECK(format_fact_line(*s->find_fact("f000001")) == "[2025-01-01] [Preference] User likes tea");
  CHECK(format_fact_lines({}, "(none)") == "(none)");
}

}
