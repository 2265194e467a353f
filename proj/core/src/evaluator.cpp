#include "comprag/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "comprag/canon.hpp"
#include "comprag/errors.hpp"

namespace comprag {
namespace {

void check_policy(const EvaluatorPolicy& policy) {
  if (!(policy.alpha >= 0.0 && policy.alpha <= 1.0)) {
    throw PolicyInvalid("alpha must lie in [0, 1]");
  }
  if (policy.cutoff_m && *policy.cutoff_m < 1) {
    throw PolicyInvalid("cutoff_m must be >= 1 when bounded");
  }
}

// Min-max normalizer over the filtration scores. Degenerate lists (single
// entry, or all scores equal) map every entry to 1.
struct ScoreNormalizer {
  explicit ScoreNormalizer(const FiltrationList& flist) {
    for (const FiltrationEntry& e : flist.entries) {
      min = std::min(min, e.score);
      max = std::max(max, e.score);
    }
    degenerate = flist.entries.size() <= 1 || min == max;
  }

  double operator()(double score) const {
    if (degenerate) return 1.0;
    return (score - min) / (max - min);
  }

  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  bool degenerate = true;
};

double semantic_norm(double similarity) { return (similarity + 1.0) / 2.0; }

}  // namespace

CorrelationMap correlate(const CorpusIndex& index, const FiltrationList& flist) {
  std::map<std::string, const FiltrationEntry*> by_canonical_key;
  for (const FiltrationEntry& entry : flist.entries) {
    by_canonical_key.emplace(canon::canonical_key(entry.object_key), &entry);
  }

  CorrelationMap cmap;
  std::set<std::string> matched_keys;
  for (const auto& [hash, chunk] : index.chunks) {
    cmap.chunk_keys.emplace(hash, chunk.object_key);
    const std::string canonical = canon::canonical_key(chunk.object_key);
    auto it = by_canonical_key.find(canonical);
    if (it == by_canonical_key.end()) {
      cmap.unmatched_hashes.insert(hash);
    } else {
      cmap.bindings.emplace(
          hash, CorrelationBinding{it->second->object_key, it->second->rank, it->second->score});
      matched_keys.insert(canonical);
    }
  }
  for (const FiltrationEntry& entry : flist.entries) {
    if (matched_keys.count(canon::canonical_key(entry.object_key)) == 0) {
      cmap.unmatched_keys.insert(entry.object_key);
    }
  }
  return cmap;
}

std::string correlation_to_json(const CorrelationMap& cmap) {
  nlohmann::json bindings = nlohmann::json::object();
  for (const auto& [hash, binding] : cmap.bindings) {
    bindings[hash] = {{"object_key", binding.object_key},
                      {"rank", binding.rank},
                      {"score", binding.score}};
  }
  nlohmann::json out;
  out["bindings"] = std::move(bindings);
  out["unmatched_hashes"] = cmap.unmatched_hashes;
  out["unmatched_keys"] = cmap.unmatched_keys;
  return out.dump(1);
}

std::vector<EvaluatedHit> evaluate(const std::vector<SemanticHit>& hits,
                                   const CorrelationMap& cmap, const FiltrationList& flist,
                                   const EvaluatorPolicy& policy) {
  check_policy(policy);
  const ScoreNormalizer normalize(flist);

  std::vector<EvaluatedHit> out;
  out.reserve(hits.size());
  for (const SemanticHit& hit : hits) {
    const auto binding = cmap.bindings.find(hit.chunk_hash);
    const bool bound = binding != cmap.bindings.end();

    if (!bound) {
      if (policy.missing_policy == MissingPolicy::kDrop) continue;
    } else if (policy.mode == EvaluatorMode::kFilter && policy.cutoff_m &&
               binding->second.rank > *policy.cutoff_m) {
      continue;
    }

    EvaluatedHit eh;
    eh.chunk_hash = hit.chunk_hash;
    const auto key_it = cmap.chunk_keys.find(hit.chunk_hash);
    eh.object_key = key_it != cmap.chunk_keys.end() ? key_it->second : std::string();
    eh.semantic = hit.similarity;
    if (bound) {
      eh.deterministic = normalize(binding->second.score);
    } else if (policy.missing_policy == MissingPolicy::kKeepZero) {
      eh.deterministic = 0.0;
    } else {  // keep_semantic: the semantic signal stands in
      eh.deterministic = semantic_norm(hit.similarity);
    }
    eh.fused = policy.alpha * semantic_norm(eh.semantic) + (1.0 - policy.alpha) * eh.deterministic;
    out.push_back(std::move(eh));
  }

  if (policy.mode == EvaluatorMode::kFuse) {
    std::stable_sort(out.begin(), out.end(), [](const EvaluatedHit& a, const EvaluatedHit& b) {
      if (a.fused != b.fused) return a.fused > b.fused;
      return a.chunk_hash < b.chunk_hash;
    });
  }

  std::size_t rank = 1;
  for (EvaluatedHit& eh : out) eh.final_rank = rank++;
  return out;
}

}  // namespace comprag
