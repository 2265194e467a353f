#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "comprag/filtration.hpp"
#include "comprag/index.hpp"

namespace comprag {

struct CorrelationBinding {
  std::string object_key;  // the filtration entry's key (out-of-model identity)
  std::size_t rank = 0;
  double score = 0.0;
};

/// Hash-level correlation between in-model chunks and the out-of-model
/// ranking. Every chunk hash appears either in bindings or in
/// unmatched_hashes, never both; at most one filtration entry binds per
/// object key.
struct CorrelationMap {
  std::map<std::string, CorrelationBinding> bindings;
  std::set<std::string> unmatched_hashes;
  std::set<std::string> unmatched_keys;

  // chunk hash -> the chunk's own object_key, for every chunk seen.
  std::map<std::string, std::string> chunk_keys;
};

/// Binds each chunk hash to the filtration entry whose key matches the
/// chunk's object_key exactly after canonicalization (NFC + case fold +
/// trim). Mismatches are reported, never fatal.
CorrelationMap correlate(const CorpusIndex& index, const FiltrationList& flist);

/// Debug dump: {"bindings": {...}, "unmatched_hashes": [...],
/// "unmatched_keys": [...]}.
std::string correlation_to_json(const CorrelationMap& cmap);

enum class EvaluatorMode {
  kPassThrough,  // keep the semantic order, just annotate
  kFilter,       // admit only chunks ranked within cutoff_m
  kFuse,         // reorder by convex combination of both signals
};

enum class MissingPolicy {
  kDrop,          // chunks without a filtration entry are removed
  kKeepZero,      // kept, with deterministic score 0
  kKeepSemantic,  // kept, exempt from the cutoff, semantic signal stands in
};

struct EvaluatorPolicy {
  EvaluatorMode mode = EvaluatorMode::kFuse;
  double alpha = 0.5;                   // weight on semantic similarity under fuse
  std::optional<std::size_t> cutoff_m;  // nullopt = unlimited
  MissingPolicy missing_policy = MissingPolicy::kKeepSemantic;
};

struct EvaluatedHit {
  std::string chunk_hash;
  std::string object_key;      // the chunk's own key
  double semantic = 0.0;       // raw cosine similarity
  double deterministic = 0.0;  // min-max normalized filtration score, in [0, 1]
  double fused = 0.0;          // alpha * (semantic+1)/2 + (1-alpha) * deterministic
  std::size_t final_rank = 0;  // 1..M consecutive
};

/// Transforms semantic hits into the prefiltered result set. The output is
/// always a subset of the input hits.
///
///   pass_through  input order kept; unmatched hits handled per missing_policy
///   filter        bound hits survive iff rank <= cutoff_m; unmatched per
///                 missing_policy (keep_semantic survivors bypass the cutoff);
///                 relative order kept
///   fuse          ordered by descending fused score, ties by ascending hash;
///                 cutoff_m is not applied
///
/// deterministic is the min-max normalization of the bound entry's score over
/// all filtration scores (a single-entry or all-equal list normalizes to 1).
/// Unmatched hits kept via keep_zero carry deterministic = 0; via
/// keep_semantic the normalized semantic value stands in, so fusion reduces
/// to the semantic signal alone. Throws PolicyInvalid.
std::vector<EvaluatedHit> evaluate(const std::vector<SemanticHit>& hits,
                                   const CorrelationMap& cmap, const FiltrationList& flist,
                                   const EvaluatorPolicy& policy);

}  // namespace comprag
