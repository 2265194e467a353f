#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "comprag/evaluator.hpp"
#include "comprag/index.hpp"

namespace comprag {

struct QueryRequest {
  std::string query_text;
  std::size_t k = 8;  // retrieval depth
  EvaluatorPolicy policy;
};

/// Answer producer. Implementations must only cite chunk hashes present in
/// the evidence; answer() enforces this and throws GroundingViolation on a
/// breach.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual std::string generate(std::string_view query, const std::vector<EvaluatedHit>& evidence,
                               const CorpusIndex& index) const = 0;
};

/// The fixed response used whenever no evidence survives evaluation.
inline constexpr std::string_view kNoSupportedAnswer =
    "No supported answer: no evidence passed retrieval and evaluation.";

/// Deterministic generator: lists the evidence object keys in evidence order,
/// each cited by its hash token, with the fusion scores.
class TemplateGenerator final : public Generator {
 public:
  std::string generate(std::string_view query, const std::vector<EvaluatedHit>& evidence,
                       const CorpusIndex& index) const override;
};

/// Client for the remote generation protocol:
///   POST <endpoint> {"query": string,
///                    "evidence": [{"hash", "object_key", "body"}]}
///   ->   {"answer": string}
/// Throws GeneratorUnavailable on transport or protocol failure.
class RemoteGenerator final : public Generator {
 public:
  explicit RemoteGenerator(std::string endpoint_url, int timeout_ms = 15000);

  std::string generate(std::string_view query, const std::vector<EvaluatedHit>& evidence,
                       const CorpusIndex& index) const override;

 private:
  std::string endpoint_url_;
  int timeout_ms_;
};

struct UnmatchedReport {
  std::vector<std::string> unmatched_hashes;
  std::vector<std::string> unmatched_keys;
};

struct StageTimings {
  double retrieve_ms = 0.0;
  double correlate_ms = 0.0;
  double evaluate_ms = 0.0;
  double generate_ms = 0.0;
};

struct AnswerBundle {
  std::string answer_text;
  std::vector<EvaluatedHit> evidence;  // evaluator output order
  UnmatchedReport unmatched_report;
  StageTimings timings;
};

/// The full flow: retrieve -> correlate -> evaluate -> generate. Empty
/// evidence short-circuits to the fixed "no supported answer" response; the
/// generator is never asked to answer without grounding material.
AnswerBundle answer(const CorpusIndex& index, const Embedder& embedder,
                    const FiltrationList& flist, const QueryRequest& request,
                    const Generator& generator);

/// All hash-token-shaped substrings of `text` (the grounding scan).
std::vector<std::string> extract_hash_tokens(std::string_view text);

std::string answer_bundle_to_json(const AnswerBundle& bundle);

}  // namespace comprag
