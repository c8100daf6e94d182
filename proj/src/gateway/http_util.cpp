#include "pgr/gateway/http_util.hpp"

#include <cstdlib>

#include <httplib.h>

#include "pgr/core/error.hpp"

namespace pgr {

ParsedUrl parse_base_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::InvalidConfig, "base_url lacks scheme: " + url);
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorCode::InvalidConfig, "unsupported scheme in base_url: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  if (path_start == std::string::npos) {
    out.scheme_host_port = url;
  } else {
    out.scheme_host_port = url.substr(0, path_start);
    out.path_prefix = url.substr(path_start);
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
  }
  return out;
}

nlohmann::json http_post_json(const BackendConfig& cfg, const std::string& path,
                              const nlohmann::json& body) {
  const ParsedUrl url = parse_base_url(cfg.base_url);
  httplib::Client client(url.scheme_host_port);
  client.set_connection_timeout(cfg.timeout_seconds, 0);
  client.set_read_timeout(cfg.timeout_seconds, 0);
  client.set_write_timeout(cfg.timeout_seconds, 0);

  httplib::Headers headers;
  if (const char* key = std::getenv(cfg.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  auto res = client.Post(url.path_prefix + path, headers, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::TransportError, httplib::to_string(res.error()));
  }
  if (res->status == 429 || res->status >= 500) {
    throw Error(ErrorCode::TransportError, "HTTP " + std::to_string(res->status));
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorCode::ProviderRefusal, "HTTP " + std::to_string(res->status));
  }
  auto parsed = nlohmann::json::parse(res->body, nullptr, false);
  if (parsed.is_discarded()) throw Error(ErrorCode::ProviderRefusal, "reply is not JSON");
  return parsed;
}

}  // namespace pgr
