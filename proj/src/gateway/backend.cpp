#include "pgr/gateway/backend.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pgr/core/error.hpp"
#include "pgr/gateway/http_util.hpp"

namespace pgr {

using nlohmann::json;

void BackendConfig::validate() const {
  if (retry.max_attempts < 1) throw Error(ErrorCode::InvalidConfig, "retry.max_attempts must be >= 1");
  if (retry.backoff_ms < 0) throw Error(ErrorCode::InvalidConfig, "retry.backoff_ms must be >= 0");
  if (max_in_flight < 1) throw Error(ErrorCode::InvalidConfig, "max_in_flight must be >= 1");
  if (temperature < 0) throw Error(ErrorCode::InvalidConfig, "temperature must be >= 0");
  if (max_output_tokens < 1) throw Error(ErrorCode::InvalidConfig, "max_output_tokens must be >= 1");
  switch (kind) {
    case BackendKind::HttpChat:
      if (base_url.empty()) throw Error(ErrorCode::InvalidConfig, "http_chat requires base_url");
      if (model_name.empty()) throw Error(ErrorCode::InvalidConfig, "http_chat requires model_name");
      break;
    case BackendKind::Scripted:
      if (script_path.empty()) throw Error(ErrorCode::InvalidConfig, "scripted requires script_path");
      break;
  }
}

json to_json(const BackendConfig& cfg) {
  json j;
  j["kind"] = cfg.kind == BackendKind::HttpChat ? "http_chat" : "scripted";
  if (cfg.kind == BackendKind::HttpChat) {
    j["base_url"] = cfg.base_url;
    j["model_name"] = cfg.model_name;
    j["embedding_model"] = cfg.embedding_model;
    j["embedding_dimension"] = cfg.embedding_dimension;
    j["api_key_env"] = cfg.api_key_env;
  } else {
    j["script_path"] = cfg.script_path;
  }
  j["retry"] = {{"max_attempts", cfg.retry.max_attempts}, {"backoff_ms", cfg.retry.backoff_ms}};
  j["max_in_flight"] = cfg.max_in_flight;
  j["timeout_seconds"] = cfg.timeout_seconds;
  j["temperature"] = cfg.temperature;
  j["max_output_tokens"] = cfg.max_output_tokens;
  return j;
}

BackendConfig backend_config_from_json(const json& j) {
  BackendConfig cfg;
  const std::string kind = j.value("kind", std::string("scripted"));
  if (kind == "http_chat") {
    cfg.kind = BackendKind::HttpChat;
  } else if (kind == "scripted") {
    cfg.kind = BackendKind::Scripted;
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown backend kind '" + kind + "'");
  }
  cfg.base_url = j.value("base_url", cfg.base_url);
  cfg.model_name = j.value("model_name", cfg.model_name);
  cfg.embedding_model = j.value("embedding_model", cfg.embedding_model);
  cfg.embedding_dimension = j.value("embedding_dimension", cfg.embedding_dimension);
  cfg.api_key_env = j.value("api_key_env", cfg.api_key_env);
  cfg.script_path = j.value("script_path", cfg.script_path);
  if (j.contains("retry")) {
    cfg.retry.max_attempts = j["retry"].value("max_attempts", cfg.retry.max_attempts);
    cfg.retry.backoff_ms = j["retry"].value("backoff_ms", cfg.retry.backoff_ms);
  }
  cfg.max_in_flight = j.value("max_in_flight", cfg.max_in_flight);
  cfg.timeout_seconds = j.value("timeout_seconds", cfg.timeout_seconds);
  cfg.temperature = j.value("temperature", cfg.temperature);
  cfg.max_output_tokens = j.value("max_output_tokens", cfg.max_output_tokens);
  if (j.contains("api_key")) {
    throw Error(ErrorCode::InvalidConfig, "API keys are read from the environment, not config files");
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Scripted

ScriptedBackend::ScriptedBackend(json script, std::size_t dimension)
    : script_(std::move(script)), fallback_(dimension) {
  if (!script_.is_object()) throw Error(ErrorCode::InvalidConfig, "script must be a JSON object");
}

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open script " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::InvalidConfig, "script " + path + " is not valid JSON");
  return std::make_shared<ScriptedBackend>(std::move(j));
}

std::string ScriptedBackend::complete(const CompletionRequest& request) const {
  auto lookup = [&](const std::string& key) -> const json* {
    auto it = script_.find(key);
    if (it == script_.end() || !it->is_object() || !it->contains("response")) return nullptr;
    return &(*it)["response"];
  };
  const json* entry = lookup(request.match_key);
  const std::string suffix = kRetrySuffix;
  if (!entry && request.match_key.size() > suffix.size() &&
      request.match_key.ends_with(suffix)) {
    entry = lookup(request.match_key.substr(0, request.match_key.size() - suffix.size()));
  }
  if (!entry) throw Error(ErrorCode::NoScriptMatch, request.match_key);
  if (!entry->is_string()) throw Error(ErrorCode::InvalidConfig, "response for " + request.match_key + " is not text");
  std::string text = entry->get<std::string>();
  if (text.empty()) throw Error(ErrorCode::ProviderRefusal, request.match_key);
  return text;
}

std::vector<EmbeddingVector> ScriptedBackend::embed(const std::vector<std::string>& texts) const {
  require_embeddable(texts);
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    auto it = script_.find(kEmbeddingPrefix + t);
    if (it != script_.end() && it->is_object() && it->contains("vector")) {
      auto raw = (*it)["vector"].get<std::vector<double>>();
      if (raw.size() != dimension()) {
        throw Error(ErrorCode::InvalidConfig, "scripted vector for '" + t + "' has dimension " +
                                                  std::to_string(raw.size()));
      }
      out.push_back(EmbeddingVector::from_raw(raw));
    } else {
      out.push_back(fallback_.embed_one(t));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// HTTP

HttpChatBackend::HttpChatBackend(BackendConfig cfg) : cfg_(std::move(cfg)) {}

std::string HttpChatBackend::complete(const CompletionRequest& request) const {
  json body = {{"model", cfg_.model_name},
               {"messages", json::array({{{"role", "user"}, {"content", request.rendered_prompt}}})},
               {"temperature", request.temperature},
               {"max_tokens", request.max_output_tokens}};
  json reply = http_post_json(cfg_, "/chat/completions", body);
  const auto& choices = reply.value("choices", json::array());
  if (!choices.is_array() || choices.empty()) throw Error(ErrorCode::ProviderRefusal, "no choices");
  const json& message = choices[0].value("message", json::object());
  if (!message.contains("content") || !message["content"].is_string()) {
    throw Error(ErrorCode::ProviderRefusal, "missing message content");
  }
  std::string text = message["content"].get<std::string>();
  if (text.empty()) throw Error(ErrorCode::ProviderRefusal, "empty message content");
  return text;
}

HttpEmbedder::HttpEmbedder(BackendConfig cfg) : cfg_(std::move(cfg)), dimension_(cfg_.embedding_dimension) {}

std::vector<EmbeddingVector> HttpEmbedder::embed(const std::vector<std::string>& texts) const {
  require_embeddable(texts);
  json body = {{"model", cfg_.embedding_model}, {"input", texts}};
  json reply = http_post_json(cfg_, "/embeddings", body);
  const auto& data = reply.value("data", json::array());
  if (!data.is_array() || data.size() != texts.size()) {
    throw Error(ErrorCode::ProviderRefusal, "embedding reply has wrong length");
  }
  std::vector<EmbeddingVector> out(texts.size());
  for (const auto& item : data) {
    const std::size_t index = item.value("index", std::size_t{0});
    auto raw = item.at("embedding").get<std::vector<double>>();
    if (raw.size() != dimension_ || index >= out.size()) {
      throw Error(ErrorCode::ProviderRefusal, "embedding has unexpected dimension " + std::to_string(raw.size()));
    }
    out[index] = EmbeddingVector::from_raw(raw);
  }
  return out;
}

}  // namespace pgr
