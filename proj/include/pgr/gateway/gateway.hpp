#pragma once

#include <atomic>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "pgr/core/error.hpp"
#include "pgr/gateway/backend.hpp"
#include "pgr/gateway/embedding.hpp"
#include "pgr/gateway/json_extract.hpp"

namespace pgr {

/// Entry point for every LLM and embedding call.
///
/// Applies the retry policy to transport failures and caps the number of
/// concurrent in-flight requests, so callers may fan out freely. Holds no
/// per-call mutable state beyond counters.
class Gateway : public std::enable_shared_from_this<Gateway> {
 public:
  Gateway(std::shared_ptr<const CompletionBackend> completions,
          std::shared_ptr<const Embedder> embedder, BackendConfig cfg);

  /// Builds the backends described by `cfg`. Scripted configs load the
  /// script file; http_chat configs with an empty embedding_model use the
  /// offline hashing embedder.
  static std::shared_ptr<Gateway> from_config(const BackendConfig& cfg);
  /// Scripted gateway over an in-memory script.
  static std::shared_ptr<Gateway> scripted(nlohmann::json script);

  /// Issues `request`, retrying TransportError up to retry.max_attempts.
  std::string complete(const CompletionRequest& request) const;

  /// Request with this gateway's default decoding parameters.
  CompletionRequest make_request(std::string prompt, std::string match_key,
                                 Expects expects = Expects::FreeText) const;

  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) const;
  const Embedder& embedder() const { return *embedder_; }
  /// Embedder that routes through this gateway (retry + in-flight cap).
  /// The gateway must be owned by a shared_ptr.
  std::shared_ptr<const Embedder> routed_embedder() const;
  const BackendConfig& config() const { return cfg_; }

  /// Total backend attempts, including transport retries.
  std::uint64_t attempts() const { return attempts_.load(); }

 private:
  class Slot;

  std::shared_ptr<const CompletionBackend> completions_;
  std::shared_ptr<const Embedder> embedder_;
  BackendConfig cfg_;
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  mutable int in_flight_ = 0;
  mutable std::atomic<std::uint64_t> attempts_{0};
};

/// Outcome of a structured request with one re-ask.
template <class T>
struct Asked {
  std::optional<T> value;
  int calls = 0;
  std::vector<std::string> raw_responses;
  /// Why the last attempt failed; empty on success.
  std::string failure;
  /// Set when the last failure came from the gateway rather than parsing.
  std::optional<ErrorCode> gateway_error;
  /// Code of the last pgr::Error raised (gateway or parse); empty on success
  /// or when the last failure was a JSON library error.
  std::optional<ErrorCode> last_error;

  bool ok() const { return value.has_value(); }
};

/// Sends `prompt`, extracts JSON and converts it with `parse` (which throws
/// pgr::Error on invalid content). On any failure the prompt is re-sent once
/// under `match_key + "#retry"` with a short correction note appended.
template <class T>
Asked<T> ask_json(const Gateway& gateway, const std::string& prompt, const std::string& match_key,
                  const std::function<T(const json&)>& parse) {
  Asked<T> out;
  std::string note;
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string text = prompt;
    std::string key = match_key;
    if (attempt == 1) {
      text += "\n\nYour previous output could not be used (" + note +
              "). Return only the requested JSON, with no other text.";
      key += ScriptedBackend::kRetrySuffix;
    }
    ++out.calls;
    try {
      std::string raw = gateway.complete(gateway.make_request(std::move(text), key, Expects::JsonValue));
      out.raw_responses.push_back(raw);
      out.value = parse(extract_json(raw));
      out.failure.clear();
      out.gateway_error.reset();
      out.last_error.reset();
      return out;
    } catch (const Error& e) {
      note = e.what();
      out.failure = e.what();
      out.last_error = e.code();
      if (is_gateway_failure(e.code())) {
        out.gateway_error = e.code();
      } else {
        out.gateway_error.reset();
      }
    } catch (const nlohmann::json::exception& e) {
      note = e.what();
      out.failure = e.what();
      out.gateway_error.reset();
      out.last_error.reset();
    }
  }
  return out;
}

}  // namespace pgr
