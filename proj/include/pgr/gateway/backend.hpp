#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pgr/gateway/embedding.hpp"

namespace pgr {

enum class Expects { FreeText, JsonValue };

struct CompletionRequest {
  std::string rendered_prompt;
  double temperature = 0.0;
  int max_output_tokens = 2048;
  Expects expects = Expects::FreeText;
  /// Stage + query id, e.g. "AUG:q1". The scripted backend answers by this
  /// key; HTTP backends ignore it.
  std::string match_key;
};

struct RetryPolicy {
  int max_attempts = 3;
  int backoff_ms = 500;
};

enum class BackendKind { HttpChat, Scripted };

struct BackendConfig {
  BackendKind kind = BackendKind::Scripted;
  std::string base_url;
  std::string model_name = "gpt-4o";
  /// Empty means the offline hashing embedder is used for embeddings.
  std::string embedding_model = "text-embedding-3-small";
  std::size_t embedding_dimension = 1536;
  std::string api_key_env = "OPENAI_API_KEY";
  std::string script_path;
  RetryPolicy retry;
  int max_in_flight = 4;
  int timeout_seconds = 120;
  double temperature = 0.0;
  int max_output_tokens = 2048;

  /// Throws Error{InvalidConfig} when a field required by `kind` is missing.
  void validate() const;
};

/// Serialized without any API key material; only the env-var name is kept.
nlohmann::json to_json(const BackendConfig& cfg);
BackendConfig backend_config_from_json(const nlohmann::json& j);

/// One chat-completion attempt. Implementations throw Error{TransportError}
/// for retryable failures, Error{ProviderRefusal} for empty or blocked
/// replies, and Error{NoScriptMatch} for missing scripted entries.
class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual std::string complete(const CompletionRequest& request) const = 0;
  virtual std::string id() const = 0;
};

/// Canned responses from a JSON script: `{key: {"response": text}}` for
/// completions and `{"EMB:" + text: {"vector": [..]}}` for embeddings.
///
/// A re-ask uses `key + "#retry"`; when that entry is absent the base entry
/// answers again. Texts without a vector entry fall back to the hashing
/// embedder, so scripted stores share its fingerprint.
class ScriptedBackend final : public CompletionBackend, public Embedder {
 public:
  static constexpr const char* kRetrySuffix = "#retry";
  static constexpr const char* kEmbeddingPrefix = "EMB:";

  explicit ScriptedBackend(nlohmann::json script,
                           std::size_t dimension = HashingEmbedder::kDefaultDimension);
  /// Reads a script file; throws Error{IoError} / Error{InvalidConfig}.
  static std::shared_ptr<ScriptedBackend> from_file(const std::string& path);

  std::string complete(const CompletionRequest& request) const override;
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) const override;
  std::size_t dimension() const override { return fallback_.dimension(); }
  std::string id() const override { return fallback_.id(); }

  bool has_entry(const std::string& key) const { return script_.contains(key); }

 private:
  nlohmann::json script_;
  HashingEmbedder fallback_;
};

/// Test and adapter hook: answers with a callable.
class CallbackBackend final : public CompletionBackend {
 public:
  using Fn = std::function<std::string(const CompletionRequest&)>;
  explicit CallbackBackend(Fn fn, std::string id = "callback") : fn_(std::move(fn)), id_(std::move(id)) {}
  std::string complete(const CompletionRequest& request) const override { return fn_(request); }
  std::string id() const override { return id_; }

 private:
  Fn fn_;
  std::string id_;
};

/// De-facto chat-completions wire format over HTTP(S).
class HttpChatBackend final : public CompletionBackend {
 public:
  explicit HttpChatBackend(BackendConfig cfg);
  std::string complete(const CompletionRequest& request) const override;
  std::string id() const override { return "http:" + cfg_.model_name; }

 private:
  BackendConfig cfg_;
};

/// `/embeddings` endpoint of the same wire format. Replies whose vector
/// length differs from `embedding_dimension` are rejected.
class HttpEmbedder final : public Embedder {
 public:
  explicit HttpEmbedder(BackendConfig cfg);
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) const override;
  std::size_t dimension() const override { return dimension_; }
  std::string id() const override { return "http:" + cfg_.embedding_model; }

 private:
  BackendConfig cfg_;
  std::size_t dimension_;
};

}  // namespace pgr
