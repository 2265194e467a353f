#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace comprag {

using EmbeddingVector = std::vector<float>;

/// Embedding provider. Implementations must be deterministic for a fixed
/// configuration; the fingerprint identifies that configuration so an index
/// is only ever queried with the embedder that built it.
class Embedder {
 public:
  virtual ~Embedder() = default;

  virtual std::size_t dim() const = 0;
  virtual std::string fingerprint() const = 0;

  /// Embeds one non-empty text. Throws std::invalid_argument on empty input.
  virtual EmbeddingVector embed(std::string_view text) const = 0;

  virtual std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) const;
};

/// Tokens used by the local embedders: ASCII-lowercased runs of alphanumeric
/// or non-ASCII bytes. Distinct from whitespace_tokens(), which only sizes
/// chunks.
std::vector<std::string> embed_tokens(std::string_view text);

/// Default embedder: feature-hashed term frequencies, L2-normalized.
/// Deterministic, dependency-free, fixed dimension.
class HashingTfEmbedder final : public Embedder {
 public:
  static constexpr std::size_t kDefaultDim = 256;

  explicit HashingTfEmbedder(std::size_t dim = kDefaultDim);

  std::size_t dim() const override { return dim_; }
  std::string fingerprint() const override;
  EmbeddingVector embed(std::string_view text) const override;

 private:
  std::size_t dim_;
};

/// Exact bag-of-words embedder over a fixed vocabulary; one dimension per
/// vocabulary token, out-of-vocabulary tokens ignored. Exists as the
/// non-hashed reference for oracle tests.
class BowReferenceEmbedder final : public Embedder {
 public:
  explicit BowReferenceEmbedder(std::vector<std::string> vocabulary);

  static BowReferenceEmbedder from_texts(const std::vector<std::string>& texts);

  std::size_t dim() const override { return vocabulary_.size(); }
  std::string fingerprint() const override;
  EmbeddingVector embed(std::string_view text) const override;

  const std::vector<std::string>& vocabulary() const { return vocabulary_; }

 private:
  std::vector<std::string> vocabulary_;  // sorted, unique
  std::string vocab_digest_;
};

/// Client for the remote embedding protocol:
///   POST <endpoint> {"texts": [string]}  ->  {"vectors": [[number]]}
/// Throws EmbedderUnavailable when the service cannot be reached or answers
/// garbage, DimensionMismatch when a returned vector has the wrong length.
class RemoteEmbedder final : public Embedder {
 public:
  RemoteEmbedder(std::string endpoint_url, std::size_t dim, int timeout_ms = 10000);

  std::size_t dim() const override { return dim_; }
  std::string fingerprint() const override;
  EmbeddingVector embed(std::string_view text) const override;
  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) const override;

 private:
  std::string endpoint_url_;
  std::size_t dim_;
  int timeout_ms_;
};

/// Cosine similarity with double accumulation; 0 when either vector has zero
/// norm. cosine(a, b) == cosine(b, a) bit-for-bit.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

}  // namespace comprag
