#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "pgr/gateway/backend.hpp"

namespace pgr {

struct ParsedUrl {
  std::string scheme_host_port;  // "http://127.0.0.1:8080"
  std::string path_prefix;       // "/v1" or ""
};

/// Splits a base URL into the origin and path prefix. Throws
/// Error{InvalidConfig} for non-http(s) URLs.
ParsedUrl parse_base_url(const std::string& url);

/// One POST attempt. Connection failures, timeouts, 429 and 5xx raise
/// Error{TransportError}; other non-2xx replies raise
/// Error{ProviderRefusal}. The bearer token comes from the env var named in
/// `cfg.api_key_env` and is never logged.
nlohmann::json http_post_json(const BackendConfig& cfg, const std::string& path,
                              const nlohmann::json& body);

}  // namespace pgr
