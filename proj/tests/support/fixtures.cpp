#include "fixtures.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "pgr/gateway/backend.hpp"

namespace pgr::test {

namespace fs = std::filesystem;

fs::path source_dir() { return PGR_SOURCE_DIR; }
fs::path fixture_dir(const std::string& name) { return source_dir() / "tests" / "fixtures" / name; }

TempDir::TempDir(const std::string& tag) {
  static int counter = 0;
  path_ = fs::path(PGR_BINARY_DIR) / "test_tmp" / (tag + "-" + std::to_string(++counter));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::shared_ptr<const Embedder> hashing() {
  static auto e = std::make_shared<HashingEmbedder>();
  return e;
}

std::shared_ptr<Gateway> scripted(const std::vector<std::pair<std::string, std::string>>& entries) {
  nlohmann::json script = nlohmann::json::object();
  for (const auto& [k, v] : entries) script[k] = {{"response", v}};
  return Gateway::scripted(std::move(script));
}

std::unique_ptr<MemoryStore> make_store(const std::vector<FactSpec>& facts, std::shared_ptr<const Embedder> embedder) {
  auto store = std::make_unique<MemoryStore>(embedder ? embedder : hashing());
  std::map<std::string, std::string> convs;
  for (const auto& f : facts) {
    if (convs.count(f.date)) continue;
    std::string id = "c" + std::to_string(convs.size() + 1);
    convs[f.date] = id;
    store->add_conversation({id, Date::parse_or_throw(f.date), {{Speaker::User, "fixture"}}});
  }
  store->clear_pending(store->pending_conversations());
  int n = 0;
  for (const auto& f : facts) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "f%06d", ++n);
    Fact fact;
    fact.fid = buf;
    fact.info = f.info;
    fact.fact_type = f.type;
    fact.frequency = f.frequency;
    fact.conversation_ids = {convs.at(f.date)};
    fact.created_date = fact.updated_date = Date::parse_or_throw(f.date);
    store->insert_fact(std::move(fact));
  }
  return store;
}

std::string random_text(std::mt19937_64& rng, int min_words, int max_words) {
  static const std::vector<std::string> vocab = {
      "apple", "river", "stone", "cloud", "train", "music", "paper", "garden", "window", "coffee",
      "mountain", "budget", "ticket", "doctor", "piano", "market", "letter", "bridge", "winter", "summer"};
  int n = min_words + static_cast<int>(rng() % static_cast<std::uint64_t>(max_words - min_words + 1));
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += vocab[rng() % vocab.size()];
  }
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PreorderReplay load_preorder() {
  PreorderReplay r;
  const fs::path dir = fixture_dir("preorder_replay");
  std::ifstream in(dir / "script.json");
  r.script = nlohmann::json::parse(in);
  r.gateway = Gateway::scripted(r.script);
  r.store = MemoryStore::load(dir / "store", r.gateway->routed_embedder());
  r.query_case = read_cases(dir / "cases.jsonl").at(0);
  return r;
}

std::shared_ptr<Gateway> recording(std::shared_ptr<Recorder> rec, nlohmann::json script) {
  auto scripted = std::make_shared<ScriptedBackend>(script);
  auto cb = std::make_shared<CallbackBackend>([rec, scripted](const CompletionRequest& req) {
    {
      std::lock_guard lock(rec->mu);
      rec->requests.push_back(req);
    }
    return scripted->complete(req);
  });
  BackendConfig cfg;
  cfg.retry.backoff_ms = 0;
  return std::make_shared<Gateway>(cb, scripted, cfg);
}

std::string tag(int i) {
  std::string t = "tag" + std::to_string(i);
  return t + " " + t + "b " + t + "c " + t + "d";
}

std::unique_ptr<MemoryStore> tagged_store(int n_facts, int n_distractors) {
  std::vector<FactSpec> specs;
  for (int i = 0; i < n_facts; ++i) specs.push_back({tag(i), "2025-01-" + std::string(i % 28 < 9 ? "0" : "") + std::to_string(1 + i % 28)});
  for (int i = 0; i < n_distractors; ++i) specs.push_back({"noise" + std::to_string(i), "2025-02-01"});
  static auto wide = std::make_shared<HashingEmbedder>(2048);
  return make_store(specs, wide);
}

nlohmann::json tagged_tree(const std::vector<std::vector<int>>& node_tags) {
  nlohmann::json nodes = nlohmann::json::array();
  std::vector<std::string> kids;
  for (std::size_t n = 1; n < node_tags.size(); ++n) kids.push_back("A" + std::to_string(n + 1));
  for (std::size_t n = 0; n < node_tags.size(); ++n) {
    std::string action;
    for (int t : node_tags[n]) action += (action.empty() ? "" : " ") + tag(t);
    if (action.empty()) action = "wait";
    nodes.push_back({{"action_id", "A" + std::to_string(n + 1)},
                     {"action", action},
                     {"constraints", ""},
                     {"parent", n == 0 ? nlohmann::json(nullptr) : nlohmann::json("A1")},
                     {"children", n == 0 ? nlohmann::json(kids) : nlohmann::json::array()}});
  }
  return nodes;
}

}  // namespace pgr::test
