#pragma once

// Independent re-implementations used as test oracles. These deliberately
// avoid the library's own code paths: different algorithms, same contracts.

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "comprag/embedder.hpp"
#include "comprag/index.hpp"

namespace comprag::test {

// Stream-extraction tokenizer, independent of whitespace_tokens().
inline std::vector<std::string> tokenize_oracle(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> tokens;
  std::string token;
  while (in >> token) tokens.push_back(token);
  return tokens;
}

// Cosine via explicit index loops (same scalar definition as the library,
// different code).
inline double cosine_oracle(const EmbeddingVector& a, const EmbeddingVector& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += double(a[i]) * double(b[i]);
    na += double(a[i]) * double(a[i]);
    nb += double(b[i]) * double(b[i]);
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

// Exhaustive top-k: score everything, full sort with the documented
// tie-break, take the prefix.
inline std::vector<SemanticHit> brute_force_topk(const CorpusIndex& index,
                                                 const EmbeddingVector& query, size_t k) {
  std::vector<SemanticHit> all;
  for (const auto& [hash, vec] : index.vectors) {
    all.push_back(SemanticHit{hash, cosine_oracle(query, vec)});
  }
  std::sort(all.begin(), all.end(), [](const SemanticHit& a, const SemanticHit& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.chunk_hash < b.chunk_hash;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

// Bag-of-words dot product straight off token count maps.
inline double bow_dot_oracle(const std::string& a, const std::string& b) {
  std::map<std::string, int> ca, cb;
  for (const auto& t : embed_tokens(a)) ca[t]++;
  for (const auto& t : embed_tokens(b)) cb[t]++;
  double dot = 0.0;
  for (const auto& [token, n] : ca) {
    auto it = cb.find(token);
    if (it != cb.end()) dot += double(n) * double(it->second);
  }
  return dot;
}

// Stable sort by (-score, key), rank assignment by position.
inline std::vector<std::pair<std::string, double>> sort_scored_oracle(
    std::vector<std::pair<std::string, double>> scored) {
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return scored;
}

// Min-max normalization recomputed from scratch.
inline double minmax_oracle(double score, const std::vector<double>& all_scores) {
  if (all_scores.size() <= 1) return 1.0;
  double lo = all_scores[0], hi = all_scores[0];
  for (double s : all_scores) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  if (lo == hi) return 1.0;
  return (score - lo) / (hi - lo);
}

inline double fused_oracle(double similarity, double deterministic, double alpha) {
  return alpha * ((similarity + 1.0) / 2.0) + (1.0 - alpha) * deterministic;
}

// Desirability recomputed term by term.
inline double desirability_oracle(double nps, double time_min, double review, double prox,
                                  double w1, double w2, double w3, double w4) {
  auto clamp01 = [](double t) { return std::min(1.0, std::max(0.0, t)); };
  const double n_nps = clamp01((nps - (-100.0)) / 200.0);
  const double n_time = clamp01((time_min - 10.0) / 50.0);
  const double n_rev = clamp01(review / 5.0);
  const double n_prox = clamp01(prox / 10.0);
  return w1 * n_nps + w2 * (1.0 - n_time) + w3 * n_rev + w4 * (1.0 - n_prox);
}

}  // namespace comprag::test
