#include "pgr/gateway/gateway.hpp"

#include <chrono>
#include <thread>

namespace pgr {

class Gateway::Slot {
 public:
  explicit Slot(const Gateway& g) : g_(g) {
    std::unique_lock lock(g_.mu_);
    g_.cv_.wait(lock, [&] { return g_.in_flight_ < g_.cfg_.max_in_flight; });
    ++g_.in_flight_;
  }
  ~Slot() {
    {
      std::lock_guard lock(g_.mu_);
      --g_.in_flight_;
    }
    g_.cv_.notify_one();
  }
  Slot(const Slot&) = delete;
  Slot& operator=(const Slot&) = delete;

 private:
  const Gateway& g_;
};

Gateway::Gateway(std::shared_ptr<const CompletionBackend> completions,
                 std::shared_ptr<const Embedder> embedder, BackendConfig cfg)
    : completions_(std::move(completions)), embedder_(std::move(embedder)), cfg_(std::move(cfg)) {
  if (!completions_ || !embedder_) throw Error(ErrorCode::InvalidConfig, "gateway needs both backends");
  if (cfg_.retry.max_attempts < 1) throw Error(ErrorCode::InvalidConfig, "retry.max_attempts must be >= 1");
  if (cfg_.max_in_flight < 1) cfg_.max_in_flight = 1;
}

std::shared_ptr<Gateway> Gateway::from_config(const BackendConfig& cfg) {
  cfg.validate();
  if (cfg.kind == BackendKind::Scripted) {
    auto scripted = ScriptedBackend::from_file(cfg.script_path);
    return std::make_shared<Gateway>(scripted, scripted, cfg);
  }
  auto chat = std::make_shared<HttpChatBackend>(cfg);
  std::shared_ptr<const Embedder> emb;
  if (cfg.embedding_model.empty()) {
    emb = std::make_shared<HashingEmbedder>();
  } else {
    emb = std::make_shared<HttpEmbedder>(cfg);
  }
  return std::make_shared<Gateway>(chat, emb, cfg);
}

std::shared_ptr<Gateway> Gateway::scripted(nlohmann::json script) {
  auto backend = std::make_shared<ScriptedBackend>(std::move(script));
  BackendConfig cfg;
  cfg.kind = BackendKind::Scripted;
  cfg.script_path = "<memory>";
  cfg.retry.backoff_ms = 0;
  return std::make_shared<Gateway>(backend, backend, cfg);
}

CompletionRequest Gateway::make_request(std::string prompt, std::string match_key, Expects expects) const {
  CompletionRequest req;
  req.rendered_prompt = std::move(prompt);
  req.temperature = cfg_.temperature;
  req.max_output_tokens = cfg_.max_output_tokens;
  req.expects = expects;
  req.match_key = std::move(match_key);
  return req;
}

std::string Gateway::complete(const CompletionRequest& request) const {
  if (request.rendered_prompt.empty()) throw Error(ErrorCode::EmptyInput, "empty prompt");
  Slot slot(*this);
  for (int attempt = 1;; ++attempt) {
    ++attempts_;
    try {
      return completions_->complete(request);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TransportError) throw;
      if (attempt >= cfg_.retry.max_attempts) {
        throw Error(ErrorCode::TransportError,
                    e.detail() + " (after " + std::to_string(attempt) + " attempts)");
      }
    }
    if (cfg_.retry.backoff_ms > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(cfg_.retry.backoff_ms) * (1 << (attempt - 1)));
    }
  }
}

namespace {

class RoutedEmbedder final : public Embedder {
 public:
  explicit RoutedEmbedder(std::shared_ptr<const Gateway> g) : g_(std::move(g)) {}
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) const override {
    return g_->embed(texts);
  }
  std::size_t dimension() const override { return g_->embedder().dimension(); }
  std::string id() const override { return g_->embedder().id(); }

 private:
  std::shared_ptr<const Gateway> g_;
};

}  // namespace

std::shared_ptr<const Embedder> Gateway::routed_embedder() const {
  return std::make_shared<RoutedEmbedder>(shared_from_this());
}

std::vector<EmbeddingVector> Gateway::embed(const std::vector<std::string>& texts) const {
  require_embeddable(texts);
  Slot slot(*this);
  for (int attempt = 1;; ++attempt) {
    try {
      return embedder_->embed(texts);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TransportError || attempt >= cfg_.retry.max_attempts) throw;
    }
    if (cfg_.retry.backoff_ms > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(cfg_.retry.backoff_ms) * (1 << (attempt - 1)));
    }
  }
}

}  // namespace pgr
