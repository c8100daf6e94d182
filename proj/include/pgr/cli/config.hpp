#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "pgr/gateway/backend.hpp"
#include "pgr/memory/store.hpp"
#include "pgr/prospection/pgr.hpp"

namespace pgr {

/// Effective configuration of one CLI invocation.
///
/// File format (JSON, every key optional):
///   {
///     "store_path": "worlds/u1/store",
///     "output_dir": "runs",
///     "backend": {"kind": "http_chat", "base_url": "...", "model_name": "gpt-4o", ...},
///     "judge_backend": {...},            // defaults to "backend"
///     "pgr": {"mode": "tot", "delta_threshold": 5, "max_iterations": 10,
///             "probe_params": {"k": 5, "tau": 0.3}, ...},
///     "extraction_cadence": 3,
///     "consolidation": {"trigger_count": 50, "window_days": 7, "cluster_threshold": 0.85}
///   }
struct RunConfig {
  std::string store_path;
  std::string output_dir = "runs";
  std::optional<BackendConfig> backend;
  std::optional<BackendConfig> judge_backend;
  PGRConfig pgr;
  int extraction_cadence = 3;
  ConsolidationParams consolidation;

  /// Throws Error{InvalidConfig}.
  void validate() const;
};

nlohmann::json to_json(const RunConfig& c);
/// Missing keys keep the values in `base`. Throws Error{InvalidConfig}.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace pgr
