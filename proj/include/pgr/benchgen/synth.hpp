#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pgr/benchgen/profile.hpp"
#include "pgr/eval/metrics.hpp"
#include "pgr/memory/store.hpp"

namespace pgr {

struct SynthParams {
  std::uint64_t seed = 1;
  int n_users = 5;
  int facts_per_user = 100;
  int queries_per_user = 3;
};

struct SynthUser {
  PersonaProfile profile;
  std::shared_ptr<MemoryStore> store;
  std::vector<QueryCase> cases;
};

/// A template-built world plus the scripted responses that drive every
/// LLM stage over it (prospection, answers, membership judge, pairwise
/// judge preferring the answer that cites more references).
struct SynthWorld {
  std::vector<SynthUser> users;
  nlohmann::json script;
};

/// Arms whose answer, recall-judge and pairwise entries the script carries.
const std::vector<std::string>& synth_arms();

/// Deterministic for a given parameter set. Uses the offline hashing
/// embedder. Throws Error{InfeasiblePlacement} when the parameters cannot
/// satisfy the world's guarantees (references dissimilar to the query,
/// every reference reachable from a prospection step).
SynthWorld synth_world(const SynthParams& params);

/// users/<id>/{profile.json, conversations.jsonl, cases.jsonl, store/} and
/// script.json under `dir`.
void write_synth_world(const SynthWorld& world, const std::filesystem::path& dir);

}  // namespace pgr
