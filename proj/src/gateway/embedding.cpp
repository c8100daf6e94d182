#include "pgr/gateway/embedding.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "pgr/core/error.hpp"
#include "pgr/simd/kernels.hpp"

namespace pgr {

namespace {

constexpr double kScale = static_cast<double>(1 << EmbeddingVector::kQuantBits);

double exact_squared_norm(std::span<const double> v) {
  return simd::active_kernels().dot(v.data(), v.data(), v.size());
}

bool on_grid(double v) {
  double scaled = v * kScale;
  return std::isfinite(v) && std::nearbyint(scaled) == scaled && std::fabs(v) <= 1.0;
}

constexpr std::array<std::string_view, 32> kStopwords = {
    "a",  "an",   "and", "are",  "as",   "at",   "be",   "by",   "for",  "from", "i",
    "in", "is",   "it",  "me",   "my",   "of",   "on",   "or",   "our",  "so",   "that",
    "the", "this", "to", "was",  "were", "will", "with", "you",  "your", "we"};

}  // namespace

EmbeddingVector EmbeddingVector::from_raw(std::span<const double> raw) {
  EmbeddingVector out;
  out.values_.assign(raw.size(), 0.0);
  double sq = 0.0;
  for (double v : raw) {
    if (!std::isfinite(v)) return out;
    sq += v * v;
  }
  if (sq == 0.0) return out;
  const double inv = 1.0 / std::sqrt(sq);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out.values_[i] = std::nearbyint(raw[i] * inv * kScale) / kScale;
  }
  out.squared_norm_ = exact_squared_norm(out.values_);
  return out;
}

EmbeddingVector EmbeddingVector::from_stored(std::vector<double> values) {
  if (!std::all_of(values.begin(), values.end(), on_grid)) return from_raw(values);
  EmbeddingVector out;
  out.values_ = std::move(values);
  out.squared_norm_ = exact_squared_norm(out.values_);
  return out;
}

double EmbeddingVector::norm() const { return std::sqrt(squared_norm_); }

double cosine_from_dot(double dot, double sq_norm_a, double sq_norm_b) {
  if (sq_norm_a == 0.0 || sq_norm_b == 0.0) return 0.0;
  return dot / std::sqrt(sq_norm_a * sq_norm_b);
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension()) {
    throw Error(ErrorCode::InvalidArgument, "embedding dimension mismatch");
  }
  const double d = simd::active_kernels().dot(a.values().data(), b.values().data(), a.dimension());
  return cosine_from_dot(d, a.squared_norm(), b.squared_norm());
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool is_stopword(std::string_view token) {
  return std::find(kStopwords.begin(), kStopwords.end(), token) != kStopwords.end();
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  };
  for (unsigned char c : text) {
    if (c >= 'A' && c <= 'Z') {
      current.push_back(static_cast<char>(c - 'A' + 'a'));
    } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80) {
      current.push_back(static_cast<char>(c));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

void require_embeddable(const std::vector<std::string>& texts) {
  if (texts.empty()) throw Error(ErrorCode::EmptyInput, "no texts to embed");
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto& t = texts[i];
    bool blank = std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isspace(c); });
    if (blank) throw Error(ErrorCode::EmptyInput, "text " + std::to_string(i) + " is blank");
  }
}

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw Error(ErrorCode::InvalidConfig, "embedding dimension must be positive");
}

std::string HashingEmbedder::id() const { return "hash-unigram-" + std::to_string(dimension_); }

std::vector<double> HashingEmbedder::features(std::string_view text) const {
  std::vector<double> counts(dimension_, 0.0);
  for (const auto& tok : tokenize(text)) {
    if (is_stopword(tok)) continue;
    const std::uint64_t h = fnv1a64(tok);
    const double sign = ((h >> 32) & 1U) ? -1.0 : 1.0;
    counts[h % dimension_] += sign;
  }
  return counts;
}

std::vector<EmbeddingVector> HashingEmbedder::embed(const std::vector<std::string>& texts) const {
  require_embeddable(texts);
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(EmbeddingVector::from_raw(features(t)));
  return out;
}

}  // namespace pgr
