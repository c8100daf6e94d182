#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pgr/gateway/gateway.hpp"
#include "pgr/memory/store.hpp"

namespace pgr {

struct ExtractionBatch {
  std::string conversation_id;
  std::vector<FactDelta> deltas;
  /// Last raw reply, kept for the audit trail.
  std::string raw_response;
  std::vector<std::string> warnings;
  int llm_calls = 0;
};

struct ExtractionOptions {
  /// Stores up to this size are shown to the prompt in full...
  std::size_t full_store_limit = 500;
  /// ...larger ones contribute this many facts most similar to the log.
  std::size_t subset_size = 200;
};

/// Facts shown to the memory-creation prompt for `log`.
std::vector<FactPtr> select_existing_facts(const MemoryStore& store, const ConversationLog& log,
                                           const ExtractionOptions& options = {});

/// Runs the memory-creation prompt (key "EXTRACT:<conversation_id>", one
/// re-ask) and validates the proposed deltas against `existing`. Invalid
/// deltas are dropped with a warning. Throws Error{UnparseableAfterRetry}
/// when no JSON list comes back, or the gateway error when the service
/// fails twice.
ExtractionBatch extract_facts(const Gateway& gateway, const ConversationLog& log,
                              const std::vector<FactPtr>& existing);

struct PendingOutcome {
  std::vector<UpsertReport> reports;
  std::vector<ExtractionBatch> batches;
  /// conversation id -> error message for logs that failed (left pending).
  std::vector<std::pair<std::string, std::string>> failures;
  std::optional<MergeReport> consolidation;
  bool ran = false;
};

struct PendingOptions {
  int cadence = 3;
  ConsolidationParams consolidation;
  ExtractionOptions extraction;
  /// Receives one JSON line per processed log when set.
  std::ostream* audit = nullptr;
};

/// When at least `cadence` logs are pending, extracts and upserts each in
/// chronological order, then checks the consolidation trigger once.
PendingOutcome process_pending(MemoryStore& store, std::shared_ptr<const Gateway> gateway,
                               const PendingOptions& options);

}  // namespace pgr
