#pragma once

#include "pgr/gateway/gateway.hpp"
#include "pgr/memory/store.hpp"

namespace pgr {

/// Scripted/LLM key for a merge group: "MERGE:" + fids joined by '+'.
std::string merge_match_key(const std::vector<FactPtr>& group);

/// FactMerger backed by the memory-merge prompt. A reply without a usable
/// "info" and "type" after one re-ask raises Error{MergePromptFailure}.
FactMerger llm_fact_merger(std::shared_ptr<const Gateway> gateway);

}  // namespace pgr
