#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pgr/answer/answer.hpp"
#include "pgr/benchgen/profile.hpp"
#include "pgr/eval/metrics.hpp"
#include "pgr/memory/store.hpp"
#include "pgr/prospection/pgr.hpp"

namespace pgr {

enum class ArmKind { QueryOnly, Pgr };

/// A retrieval system under evaluation.
struct ArmSpec {
  std::string name;
  ArmKind kind = ArmKind::Pgr;
  PGRConfig pgr;  // Pgr arms
  RetrievalParams query_only{20, 0.3};
};

/// Resolves an arm name against `base`:
///   query-only
///   pgr[-cot|-tot][-base][-nosum]
/// ("base" disables the refinement loop, "nosum" the answer-time summary).
/// Throws Error{InvalidArgument}.
ArmSpec arm_from_name(const std::string& name, const PGRConfig& base);

struct ArmRun {
  std::string arm;
  std::string query_id;
  std::vector<std::string> fids;
  std::vector<FactPtr> facts;
  std::string summary;
  std::optional<PGRResult> pgr;
};

ArmRun run_arm(const ArmSpec& arm, const QueryCase& c, const MemoryStore& store, const Gateway& gateway);

std::string recall_judge_key(const std::string& arm, const std::string& query_id);
std::string answer_key(const std::string& arm, const std::string& query_id);

/// One user's slice of a dataset.
struct UserData {
  PersonaProfile profile;
  std::shared_ptr<const MemoryStore> store;
  std::vector<QueryCase> cases;
};

/// Reads users/<id>/{store/, cases.jsonl, profile.json} under `root`, users
/// in lexicographic order. Throws Error{IoError} when a user has no store.
std::vector<UserData> load_dataset(const std::filesystem::path& root, std::shared_ptr<const Embedder> embedder);

struct EvalOptions {
  std::vector<ArmSpec> arms;
  bool oracle = true;
  bool judged = false;
  bool pairwise = false;
  /// Pairwise arms; default to the first two arms.
  std::string pair_a;
  std::string pair_b;
  int jobs = 1;
};

struct ArmResults {
  std::vector<ArmRun> runs;
  std::vector<RecallResult> recalls;
  std::vector<AnswerRecord> answers;
  std::optional<Report> report;
};

struct EvalOutcome {
  std::vector<std::string> arm_order;
  std::map<std::string, ArmResults> arms;
  std::vector<PairwiseOutcome> pairs;
  std::optional<Report> pair_report;
  std::vector<std::string> warnings;
  /// Case id -> user id, for detail files.
  std::map<std::string, std::string> case_users;
};

/// Runs every arm over every case, then the requested metrics.
/// `generation` serves prospection and answers, `judge` the metric prompts.
EvalOutcome run_eval(const std::vector<UserData>& users, const Gateway& generation, const Gateway& judge,
                     const EvalOptions& options);

nlohmann::json report_json(const EvalOutcome& outcome, const EvalOptions& options);

/// Writes report.json, recall_details.jsonl, pairwise_details.jsonl,
/// answers/<arm>.jsonl and trace/<arm>/<query_id>.json under `dir`.
void write_eval_outputs(const EvalOutcome& outcome, const EvalOptions& options, const std::filesystem::path& dir);

}  // namespace pgr
