#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "pgr/memory/types.hpp"

namespace pgr {

struct UpsertReport {
  int added = 0;
  int updated = 0;
  /// Temporary delta id ("NEW_1") -> assigned store fid, for adds.
  std::map<std::string, std::string> assigned;
};

struct ConsolidationParams {
  double similarity_threshold = 0.85;
  int window_days = 7;
  int trigger_count = 50;
  /// Run even if fewer than trigger_count facts were added since the last
  /// merge.
  bool force = false;
};

struct MergedGroup {
  std::string fid;
  std::vector<std::string> merged_fids;
};

struct MergeReport {
  bool triggered = false;
  int groups_merged = 0;
  /// Original facts removed (each merged group then adds one fact back).
  int facts_removed = 0;
  std::vector<MergedGroup> merged;
  /// Groups skipped because the merge prompt failed after its re-ask.
  std::vector<std::vector<std::string>> failed_groups;
};

/// The LLM-authored part of a merge: the caller fixes fid, frequency,
/// provenance and merged_fids itself.
struct MergeText {
  std::string info;
  FactType fact_type = FactType::Event;
  std::vector<std::string> related_entities;
};

/// Produces merged text for a group (sorted by fid). Throws
/// Error{MergePromptFailure} to skip the group.
using FactMerger = std::function<MergeText(const std::vector<FactPtr>& group)>;

/// Long-term memory: append-only conversation logs plus a table of atomic
/// facts searched by exhaustive cosine scan.
///
/// Readers (retrieve, snapshots) take a shared lock; mutations take an
/// exclusive one. Fact objects are immutable once published, so a
/// ScoredFact stays valid after the store changes.
class MemoryStore {
 public:
  explicit MemoryStore(std::shared_ptr<const Embedder> embedder);
  MemoryStore(const MemoryStore&) = delete;
  MemoryStore& operator=(const MemoryStore&) = delete;

  /// Reads facts.jsonl, conversations.jsonl and meta.json from `dir`.
  /// Throws Error{IoError}, Error{CorruptRecord} (detail "file:line"), or
  /// Error{EmbedderMismatch} when meta.json names another embedder.
  static std::unique_ptr<MemoryStore> load(const std::filesystem::path& dir,
                                           std::shared_ptr<const Embedder> embedder);
  /// Writes the three files into `dir`, creating it if needed.
  void save(const std::filesystem::path& dir) const;

  /// Throws Error{DuplicateId} or Error{InvalidArgument} (no turns).
  std::string add_conversation(ConversationLog log);

  /// Applies extraction deltas atomically: everything is validated and
  /// embedded before the first write. Throws Error{UnknownFid},
  /// Error{FrequencyRegression}, Error{InvalidArgument} (unknown source
  /// conversation, bad delta).
  UpsertReport upsert_facts(const std::vector<FactDelta>& deltas, const std::string& source_conversation,
                            Date date);

  /// Inserts a fully formed fact (fixture worlds, imports). The embedding is
  /// computed when empty. Does not count toward the consolidation trigger.
  void insert_fact(Fact fact);

  /// Top-k facts with cosine >= tau, by descending score then ascending fid.
  /// Throws Error{EmptyQuery}.
  std::vector<ScoredFact> retrieve(const std::string& query_text, const RetrievalParams& params) const;
  std::vector<ScoredFact> retrieve(const EmbeddingVector& query, const RetrievalParams& params) const;

  /// Clusters facts (single linkage at the similarity threshold) and merges
  /// each cluster's in-window subset via `merger`. A no-op returning
  /// triggered=false unless forced or the new-fact counter has reached the
  /// trigger.
  MergeReport consolidate(const ConsolidationParams& params, const FactMerger& merger);

  /// Pending-extraction bookkeeping.
  std::vector<std::string> pending_conversations() const;
  void clear_pending(const std::vector<std::string>& ids);

  std::size_t fact_count() const;
  std::size_t conversation_count() const;
  int new_fact_counter() const;
  std::vector<FactPtr> facts() const;
  FactPtr find_fact(const std::string& fid) const;
  std::optional<ConversationLog> find_conversation(const std::string& id) const;
  std::vector<ConversationLog> conversations() const;
  const Embedder& embedder() const { return *embedder_; }
  std::shared_ptr<const Embedder> embedder_ptr() const { return embedder_; }

  /// Field-by-field equality of contents and counters.
  bool same_contents(const MemoryStore& other) const;

 private:
  std::string fresh_fid_locked();
  void publish_locked(FactPtr fact);
  void rebuild_matrix_locked();
  std::vector<ScoredFact> scan_locked(const EmbeddingVector& query, const RetrievalParams& params) const;

  std::shared_ptr<const Embedder> embedder_;
  mutable std::shared_mutex mu_;

  std::vector<FactPtr> facts_;
  std::unordered_map<std::string, std::size_t> fact_index_;
  std::vector<double> matrix_;  // facts_.size() x dimension, row-major
  std::vector<double> sq_norms_;

  std::vector<ConversationLog> logs_;
  std::unordered_map<std::string, std::size_t> log_index_;
  std::vector<std::string> pending_;
  int new_fact_counter_ = 0;
  std::uint64_t next_fid_ = 1;
};

}  // namespace pgr
