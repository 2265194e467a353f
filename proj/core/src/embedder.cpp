#include "comprag/embedder.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "comprag/errors.hpp"
#include "comprag/hash.hpp"

namespace comprag {
namespace {

using nlohmann::json;

void require_non_empty(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("cannot embed empty text");
}

EmbeddingVector l2_normalized(const std::vector<double>& counts) {
  double sumsq = 0.0;
  for (double c : counts) sumsq += c * c;
  const double norm = std::sqrt(sumsq);
  EmbeddingVector out(counts.size(), 0.0f);
  if (norm > 0.0) {
    for (size_t i = 0; i < counts.size(); ++i) {
      out[i] = static_cast<float>(counts[i] / norm);
    }
  }
  return out;
}

// Splits "scheme://host:port/path" into a client base and a request path.
std::pair<std::string, std::string> split_url(const std::string& url) {
  const size_t scheme = url.find("://");
  const size_t path_start = scheme == std::string::npos ? url.find('/') : url.find('/', scheme + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

std::vector<EmbeddingVector> Embedder::embed_batch(const std::vector<std::string>& texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const std::string& text : texts) out.push_back(embed(text));
  return out;
}

std::vector<std::string> embed_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    const bool token_char =
        (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
    if (token_char) {
      current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a')
                                             : static_cast<char>(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

HashingTfEmbedder::HashingTfEmbedder(std::size_t dim) : dim_(dim) {
  if (dim_ < 1) throw std::invalid_argument("embedding dimension must be >= 1");
}

std::string HashingTfEmbedder::fingerprint() const {
  return "hashtf:v1:dim=" + std::to_string(dim_);
}

EmbeddingVector HashingTfEmbedder::embed(std::string_view text) const {
  require_non_empty(text);
  std::vector<double> counts(dim_, 0.0);
  for (const std::string& token : embed_tokens(text)) {
    const Hash128 h = murmur3_x64_128(token.data(), token.size(), 0);
    counts[h.h1 % dim_] += 1.0;
  }
  return l2_normalized(counts);
}

BowReferenceEmbedder::BowReferenceEmbedder(std::vector<std::string> vocabulary)
    : vocabulary_(std::move(vocabulary)) {
  std::sort(vocabulary_.begin(), vocabulary_.end());
  vocabulary_.erase(std::unique(vocabulary_.begin(), vocabulary_.end()), vocabulary_.end());
  if (vocabulary_.empty()) {
    throw std::invalid_argument("bag-of-words vocabulary must be non-empty");
  }
  std::string joined;
  for (const std::string& token : vocabulary_) {
    joined += token;
    joined += '\n';
  }
  vocab_digest_ = to_hex(murmur3_x64_128(joined.data(), joined.size(), 0));
}

BowReferenceEmbedder BowReferenceEmbedder::from_texts(const std::vector<std::string>& texts) {
  std::set<std::string> vocab;
  for (const std::string& text : texts) {
    for (std::string& token : embed_tokens(text)) vocab.insert(std::move(token));
  }
  return BowReferenceEmbedder(std::vector<std::string>(vocab.begin(), vocab.end()));
}

std::string BowReferenceEmbedder::fingerprint() const {
  return "bowref:v1:dim=" + std::to_string(vocabulary_.size()) + ":vocab=" + vocab_digest_;
}

EmbeddingVector BowReferenceEmbedder::embed(std::string_view text) const {
  require_non_empty(text);
  std::vector<double> counts(vocabulary_.size(), 0.0);
  for (const std::string& token : embed_tokens(text)) {
    auto it = std::lower_bound(vocabulary_.begin(), vocabulary_.end(), token);
    if (it != vocabulary_.end() && *it == token) {
      counts[static_cast<size_t>(it - vocabulary_.begin())] += 1.0;
    }
  }
  return l2_normalized(counts);
}

RemoteEmbedder::RemoteEmbedder(std::string endpoint_url, std::size_t dim, int timeout_ms)
    : endpoint_url_(std::move(endpoint_url)), dim_(dim), timeout_ms_(timeout_ms) {
  if (endpoint_url_.empty()) throw std::invalid_argument("remote embedder needs an endpoint URL");
  if (dim_ < 1) throw std::invalid_argument("embedding dimension must be >= 1");
}

std::string RemoteEmbedder::fingerprint() const {
  return "remote:" + endpoint_url_ + ":dim=" + std::to_string(dim_);
}

EmbeddingVector RemoteEmbedder::embed(std::string_view text) const {
  require_non_empty(text);
  return embed_batch({std::string(text)}).front();
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(
    const std::vector<std::string>& texts) const {
  for (const std::string& text : texts) require_non_empty(text);
  if (texts.empty()) return {};

  const auto [base, path] = split_url(endpoint_url_);
  httplib::Client client(base);
  client.set_connection_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);
  client.set_read_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);

  const json request = {{"texts", texts}};
  auto res = client.Post(path, request.dump(), "application/json");
  if (!res) {
    throw EmbedderUnavailable("embedding service unreachable at " + endpoint_url_ + " (" +
                              httplib::to_string(res.error()) + ")");
  }
  if (res->status != 200) {
    throw EmbedderUnavailable("embedding service at " + endpoint_url_ + " answered HTTP " +
                              std::to_string(res->status));
  }
  const json body = json::parse(res->body, nullptr, /*allow_exceptions=*/false);
  if (body.is_discarded() || !body.is_object() || !body.contains("vectors") ||
      !body["vectors"].is_array()) {
    throw EmbedderUnavailable("embedding service returned a malformed response");
  }
  const json& vectors = body["vectors"];
  if (vectors.size() != texts.size()) {
    throw EmbedderUnavailable("embedding service returned " + std::to_string(vectors.size()) +
                              " vectors for " + std::to_string(texts.size()) + " texts");
  }

  std::vector<EmbeddingVector> out;
  out.reserve(vectors.size());
  for (const json& row : vectors) {
    if (!row.is_array() || row.size() != dim_) {
      throw DimensionMismatch("embedding service returned a vector of length " +
                              std::to_string(row.size()) + ", expected " + std::to_string(dim_));
    }
    EmbeddingVector v;
    v.reserve(dim_);
    for (const json& x : row) {
      if (!x.is_number()) throw EmbedderUnavailable("embedding vector entry is not a number");
      const double value = x.get<double>();
      if (!std::isfinite(value)) {
        throw EmbedderUnavailable("embedding vector entry is not finite");
      }
      v.push_back(static_cast<float>(value));
    }
    out.push_back(std::move(v));
  }
  return out;
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("cosine over vectors of different dimension");
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    na += static_cast<double>(a[i]) * static_cast<double>(a[i]);
    nb += static_cast<double>(b[i]) * static_cast<double>(b[i]);
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

}  // namespace comprag
