#include "pgr/cli/config.hpp"

#include <fstream>
#include <set>

namespace pgr {

using nlohmann::json;

void RunConfig::validate() const {
  if (output_dir.empty()) throw Error(ErrorCode::InvalidConfig, "output_dir is empty");
  if (extraction_cadence < 1) throw Error(ErrorCode::InvalidConfig, "extraction_cadence must be >= 1");
  if (consolidation.trigger_count < 1) throw Error(ErrorCode::InvalidConfig, "consolidation.trigger_count must be >= 1");
  if (consolidation.window_days < 0) throw Error(ErrorCode::InvalidConfig, "consolidation.window_days must be >= 0");
  if (consolidation.similarity_threshold < -1 || consolidation.similarity_threshold > 1) {
    throw Error(ErrorCode::InvalidConfig, "consolidation.cluster_threshold must be in [-1, 1]");
  }
  pgr.validate();
  if (backend) backend->validate();
  if (judge_backend) judge_backend->validate();
}

json to_json(const RunConfig& c) {
  json out{{"store_path", c.store_path},
           {"output_dir", c.output_dir},
           {"pgr", to_json(c.pgr)},
           {"extraction_cadence", c.extraction_cadence},
           {"consolidation",
            {{"trigger_count", c.consolidation.trigger_count},
             {"window_days", c.consolidation.window_days},
             {"cluster_threshold", c.consolidation.similarity_threshold}}}};
  out["backend"] = c.backend ? to_json(*c.backend) : json(nullptr);
  out["judge_backend"] = c.judge_backend ? to_json(*c.judge_backend) : (c.backend ? to_json(*c.backend) : json(nullptr));
  return out;
}

RunConfig run_config_from_json(const json& j, RunConfig c) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  static const std::set<std::string> known{"store_path", "output_dir",         "backend",      "judge_backend",
                                           "pgr",        "extraction_cadence", "consolidation"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
  }
  try {
    if (j.contains("store_path")) c.store_path = j["store_path"].get<std::string>();
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("extraction_cadence")) c.extraction_cadence = j["extraction_cadence"].get<int>();
    if (j.contains("consolidation")) {
      const json& k = j["consolidation"];
      for (const auto& [key, value] : k.items()) {
        if (key != "trigger_count" && key != "window_days" && key != "cluster_threshold") {
          throw Error(ErrorCode::InvalidConfig, "unknown consolidation key '" + key + "'");
        }
      }
      if (k.contains("trigger_count")) c.consolidation.trigger_count = k["trigger_count"].get<int>();
      if (k.contains("window_days")) c.consolidation.window_days = k["window_days"].get<int>();
      if (k.contains("cluster_threshold")) c.consolidation.similarity_threshold = k["cluster_threshold"].get<double>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  if (j.contains("pgr")) c.pgr = pgr_config_from_json(j["pgr"], c.pgr);
  if (j.contains("backend") && !j["backend"].is_null()) c.backend = backend_config_from_json(j["backend"]);
  if (j.contains("judge_backend") && !j["judge_backend"].is_null()) {
    c.judge_backend = backend_config_from_json(j["judge_backend"]);
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

}  // namespace pgr
