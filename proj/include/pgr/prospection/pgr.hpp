#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pgr/core/date.hpp"
#include "pgr/core/error.hpp"
#include "pgr/gateway/gateway.hpp"
#include "pgr/memory/store.hpp"
#include "pgr/prospection/structure.hpp"

namespace pgr {

struct PGRConfig {
  ProspectionMode mode = ProspectionMode::Tot;
  int delta_threshold = 5;
  int max_iterations = 10;
  RetrievalParams probe_params{5, 0.3};
  RetrievalParams augment_params{10, 0.6};
  RetrievalParams query_only_params{20, 0.3};
  bool iterative = true;
  bool use_summary = true;
  /// Probe with "action; constraints" rather than the action alone.
  bool probe_with_constraints = true;

  /// Throws Error{InvalidConfig}.
  void validate() const;
};

nlohmann::json to_json(const PGRConfig& c);
/// Missing keys keep their defaults. Throws Error{InvalidConfig}.
PGRConfig pgr_config_from_json(const nlohmann::json& j, PGRConfig base = {});

struct ProbeRecord {
  std::string text;
  RetrievalParams params;
  std::vector<std::pair<std::string, double>> hits;
};

/// One stage of the loop. Iteration 0 is Phase 1 (S^0 plus the query-only
/// retrieval); iterations >= 1 are refinements.
struct IterationRecord {
  int iteration = 0;
  ProspectionStructure structure;
  std::vector<ProbeRecord> probes;
  /// Fids added to R by this stage, in insertion order.
  std::vector<std::string> new_fact_ids;
  int llm_calls = 0;
  bool degraded = false;
  std::vector<std::string> notes;
};

struct PGRResult {
  std::string query_id;
  std::string query;
  Date query_date;
  std::string augmented_query;
  int augment_calls = 0;
  std::vector<std::string> augment_context_fids;
  /// R*, first-insertion order, each with the highest score it was seen at.
  std::vector<ScoredFact> final_facts;
  std::string summary;
  int summary_calls = 0;
  std::vector<IterationRecord> trace;
  std::vector<std::string> notes;

  std::vector<std::string> final_fids() const;
  std::vector<FactPtr> final_fact_ptrs() const;
};

struct LlmCallCounts {
  int augment = 0;
  int phase1 = 0;
  int refinements = 0;
  int summary = 0;
  int total() const { return augment + phase1 + refinements + summary; }
  friend bool operator==(const LlmCallCounts&, const LlmCallCounts&) = default;
};

/// Outcome of an LLM stage that may degrade instead of throwing.
struct StageOutcome {
  std::optional<ProspectionStructure> structure;
  int calls = 0;
  /// Set on failure: InvalidTree, UnparseableAfterRetry, or the gateway code.
  std::optional<ErrorCode> error;
  std::string failure;
};

struct AugmentOutcome {
  std::string text;
  int calls = 0;
  std::vector<std::string> context_fids;
  std::string note;  // non-empty when the stage fell back to q
};

struct SummaryOutcome {
  std::string text;
  int calls = 0;
  std::string note;
};

// Scripted-backend match keys.
std::string augment_key(const std::string& query_id);
std::string phase1_key(ProspectionMode mode, const std::string& query_id);
std::string refine_key(ProspectionMode mode, int iteration, const std::string& query_id);
std::string summary_key(const std::string& query_id);

/// Throws Error{EmptyQuery} for an empty query. Gateway failures fall back
/// to q_A = q with a note.
AugmentOutcome augment_query(const Gateway& gateway, const MemoryStore& store, const std::string& q, Date date,
                             const RetrievalParams& augment_params, const std::string& query_id);

/// S^0, one re-ask on parse or tree-invariant failure.
StageOutcome generate_initial(const Gateway& gateway, const std::string& q_a, Date date, ProspectionMode mode,
                              const std::string& query_id);

/// Union of retrieve(probe_text(step)) over every step or tree node, keyed
/// by fid with each fact's maximum score, in first-seen order.
std::vector<ScoredFact> probe(const ProspectionStructure& structure, const MemoryStore& store,
                              const RetrievalParams& params, bool with_constraints = true,
                              std::vector<ProbeRecord>* records = nullptr);

/// S^i from S^{i-1} and the facts gathered so far. On a second failure the
/// outcome holds `previous` unchanged and `error` is set.
StageOutcome refine(const Gateway& gateway, const std::string& q_a, const std::vector<FactPtr>& facts_so_far,
                    const ProspectionStructure& previous, Date date, int iteration, const std::string& query_id);

/// Returns the completion verbatim, or empty text with a note on gateway
/// failure. `structures` must be non-empty.
SummaryOutcome summarize_prospection(const Gateway& gateway, const std::vector<ProspectionStructure>& structures,
                                     const std::string& q_a, Date date, const std::string& query_id);

/// The full loop: augment, phase 1, refinements, summary. Degraded stages are recorded in the trace; only
/// configuration and store errors propagate.
PGRResult run_pgr(const std::string& q, Date date, const MemoryStore& store, const Gateway& gateway,
                  const PGRConfig& config, const std::string& query_id);

LlmCallCounts count_llm_calls(const PGRResult& result);

nlohmann::json to_json(const PGRResult& r);
/// Writes `<dir>/<query_id>.json`.
void write_trace(const PGRResult& r, const std::filesystem::path& dir);

}  // namespace pgr
