#pragma once

#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pgr/gateway/gateway.hpp"
#include "pgr/eval/metrics.hpp"
#include "pgr/memory/store.hpp"
#include "pgr/prospection/pgr.hpp"

namespace pgr::test {

std::filesystem::path source_dir();
std::filesystem::path fixture_dir(const std::string& name);

/// Fresh empty directory under the build tree, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

std::shared_ptr<const Embedder> hashing();

/// Scripted gateway with "response" entries built from key -> text pairs.
std::shared_ptr<Gateway> scripted(const std::vector<std::pair<std::string, std::string>>& entries);

/// Store whose facts are inserted with explicit fids, one conversation per
/// distinct date. Dates default to 2025-01-01.
struct FactSpec {
  std::string info;
  std::string date = "2025-01-01";
  int frequency = 1;
  FactType type = FactType::Event;
};
std::unique_ptr<MemoryStore> make_store(const std::vector<FactSpec>& facts,
                                        std::shared_ptr<const Embedder> embedder = nullptr);

/// Random text over a small vocabulary so that overlaps (and hence score
/// ties and threshold crossings) are common.
std::string random_text(std::mt19937_64& rng, int min_words, int max_words);

std::string read_file(const std::filesystem::path& p);

/// The bundled pre-order replay (tests/fixtures/preorder_replay).
struct PreorderReplay {
  std::shared_ptr<Gateway> gateway;
  std::unique_ptr<MemoryStore> store;
  QueryCase query_case;
  nlohmann::json script;
};
PreorderReplay load_preorder();

/// Gateway over a callback backend that records every request.
struct Recorder {
  std::vector<CompletionRequest> requests;
  std::mutex mu;
};
std::shared_ptr<Gateway> recording(std::shared_ptr<Recorder> rec, nlohmann::json script);

/// Store of facts tag(i) (four private tokens each, wide hashing
/// embedder), so a probe naming tags hits exactly those facts.
std::unique_ptr<MemoryStore> tagged_store(int n_facts, int n_distractors = 0);
std::string tag(int i);

/// ToT reply whose node actions name the given tags (root first, the rest
/// as its children).
nlohmann::json tagged_tree(const std::vector<std::vector<int>>& node_tags);

}  // namespace pgr::test
