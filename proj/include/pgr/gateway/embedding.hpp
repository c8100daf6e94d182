#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pgr {

/// Unit-length embedding quantized onto a 2^-20 grid.
///
/// Quantizing makes every dot product between two embeddings an exact sum
/// of integers scaled by 2^-40, so scores do not depend on accumulation
/// order (scalar, AVX2 and NEON scans agree bit for bit).
class EmbeddingVector {
 public:
  static constexpr int kQuantBits = 20;

  EmbeddingVector() = default;

  /// Normalizes `raw` to unit L2 length and quantizes. An all-zero or
  /// non-finite input yields the degenerate zero vector of that dimension.
  static EmbeddingVector from_raw(std::span<const double> raw);
  /// Adopts values that are already normalized and on the grid (e.g. read
  /// back from disk). Re-quantizes defensively only if a value is off-grid.
  static EmbeddingVector from_stored(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t dimension() const { return values_.size(); }
  double squared_norm() const { return squared_norm_; }
  double norm() const;
  bool degenerate() const { return squared_norm_ == 0.0; }

  friend bool operator==(const EmbeddingVector& a, const EmbeddingVector& b) {
    return a.values_ == b.values_;
  }

 private:
  std::vector<double> values_;
  double squared_norm_ = 0.0;
};

/// cos(a, b) = dot / sqrt(|a|^2 |b|^2); 0 when either side is degenerate.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

/// Same formula for a precomputed dot product.
double cosine_from_dot(double dot, double sq_norm_a, double sq_norm_b);

/// Source of embeddings with a fixed output dimension.
class Embedder {
 public:
  virtual ~Embedder() = default;

  /// One vector per input text. Throws Error{EmptyInput} on an empty list or
  /// a blank text.
  virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) const = 0;
  virtual std::size_t dimension() const = 0;
  /// Stable identifier persisted in store metadata; stores built with a
  /// different identifier are rejected on load.
  virtual std::string id() const = 0;

  EmbeddingVector embed_one(const std::string& text) const { return embed({text}).front(); }
};

/// Token-unigram feature hashing: lowercase alphanumeric tokens minus a
/// short stopword list, FNV-1a 64 hashed into `dimension` signed buckets,
/// L2-normalized.
class HashingEmbedder final : public Embedder {
 public:
  static constexpr std::size_t kDefaultDimension = 256;

  explicit HashingEmbedder(std::size_t dimension = kDefaultDimension);

  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) const override;
  std::size_t dimension() const override { return dimension_; }
  std::string id() const override;

  /// Raw (pre-normalization) bucket counts.
  std::vector<double> features(std::string_view text) const;

 private:
  std::size_t dimension_;
};

std::vector<std::string> tokenize(std::string_view text);
std::uint64_t fnv1a64(std::string_view bytes);
bool is_stopword(std::string_view token);

/// Throws Error{EmptyInput} unless `texts` is non-empty and every entry has
/// a non-whitespace character.
void require_embeddable(const std::vector<std::string>& texts);

}  // namespace pgr
