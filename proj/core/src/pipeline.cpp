#include "comprag/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <set>
#include <stdexcept>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "comprag/errors.hpp"
#include "comprag/hash.hpp"

namespace comprag {
namespace {

using nlohmann::json;

std::string format_score(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

std::pair<std::string, std::string> split_url(const std::string& url) {
  const size_t scheme = url.find("://");
  const size_t path_start = scheme == std::string::npos ? url.find('/') : url.find('/', scheme + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

std::string TemplateGenerator::generate(std::string_view /*query*/,
                                        const std::vector<EvaluatedHit>& evidence,
                                        const CorpusIndex& /*index*/) const {
  if (evidence.empty()) return std::string(kNoSupportedAnswer);
  std::string out = "Based on " + std::to_string(evidence.size()) +
                    " evidence chunk(s), the recommended options are:\n";
  for (const EvaluatedHit& hit : evidence) {
    out += std::to_string(hit.final_rank) + ". " + hit.object_key + " [" + hit.chunk_hash +
           "] (semantic " + format_score(hit.semantic) + ", deterministic " +
           format_score(hit.deterministic) + ", fused " + format_score(hit.fused) + ")\n";
  }
  return out;
}

RemoteGenerator::RemoteGenerator(std::string endpoint_url, int timeout_ms)
    : endpoint_url_(std::move(endpoint_url)), timeout_ms_(timeout_ms) {
  if (endpoint_url_.empty()) {
    throw std::invalid_argument("remote generator needs an endpoint URL");
  }
}

std::string RemoteGenerator::generate(std::string_view query,
                                      const std::vector<EvaluatedHit>& evidence,
                                      const CorpusIndex& index) const {
  json evidence_json = json::array();
  for (const EvaluatedHit& hit : evidence) {
    const auto chunk = index.chunks.find(hit.chunk_hash);
    evidence_json.push_back({{"hash", hit.chunk_hash},
                             {"object_key", hit.object_key},
                             {"body", chunk != index.chunks.end() ? chunk->second.body : ""}});
  }
  const json request = {{"query", std::string(query)}, {"evidence", std::move(evidence_json)}};

  const auto [base, path] = split_url(endpoint_url_);
  httplib::Client client(base);
  client.set_connection_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);
  client.set_read_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);

  auto res = client.Post(path, request.dump(), "application/json");
  if (!res) {
    throw GeneratorUnavailable("generation service unreachable at " + endpoint_url_ + " (" +
                               httplib::to_string(res.error()) + ")");
  }
  if (res->status != 200) {
    throw GeneratorUnavailable("generation service at " + endpoint_url_ + " answered HTTP " +
                               std::to_string(res->status));
  }
  const json body = json::parse(res->body, nullptr, /*allow_exceptions=*/false);
  if (body.is_discarded() || !body.is_object() || !body.contains("answer") ||
      !body["answer"].is_string()) {
    throw GeneratorUnavailable("generation service returned a malformed response");
  }
  return body["answer"].get<std::string>();
}

AnswerBundle answer(const CorpusIndex& index, const Embedder& embedder,
                    const FiltrationList& flist, const QueryRequest& request,
                    const Generator& generator) {
  if (request.query_text.empty()) throw std::invalid_argument("query_text must be non-empty");
  if (request.k < 1) throw std::invalid_argument("retrieval depth k must be >= 1");

  AnswerBundle bundle;

  auto t = std::chrono::steady_clock::now();
  const std::vector<SemanticHit> hits = retrieve(index, embedder, request.query_text, request.k);
  bundle.timings.retrieve_ms = elapsed_ms(t);

  t = std::chrono::steady_clock::now();
  const CorrelationMap cmap = correlate(index, flist);
  bundle.timings.correlate_ms = elapsed_ms(t);
  bundle.unmatched_report.unmatched_hashes.assign(cmap.unmatched_hashes.begin(),
                                                  cmap.unmatched_hashes.end());
  bundle.unmatched_report.unmatched_keys.assign(cmap.unmatched_keys.begin(),
                                                cmap.unmatched_keys.end());

  t = std::chrono::steady_clock::now();
  bundle.evidence = evaluate(hits, cmap, flist, request.policy);
  bundle.timings.evaluate_ms = elapsed_ms(t);

  t = std::chrono::steady_clock::now();
  if (bundle.evidence.empty()) {
    bundle.answer_text = kNoSupportedAnswer;
  } else {
    bundle.answer_text = generator.generate(request.query_text, bundle.evidence, index);
    std::set<std::string> cited_allowed;
    for (const EvaluatedHit& hit : bundle.evidence) cited_allowed.insert(hit.chunk_hash);
    for (const std::string& token : extract_hash_tokens(bundle.answer_text)) {
      if (cited_allowed.count(token) == 0) {
        throw GroundingViolation("generator cited hash " + token +
                                 " which is not in the evidence list");
      }
    }
  }
  bundle.timings.generate_ms = elapsed_ms(t);
  return bundle;
}

std::vector<std::string> extract_hash_tokens(std::string_view text) {
  const auto is_hex = [](char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
  };
  std::vector<std::string> tokens;
  size_t i = 0;
  while (i < text.size()) {
    if (!is_hex(text[i])) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < text.size() && is_hex(text[j])) ++j;
    if (j - i == kHashHexWidth) tokens.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return tokens;
}

std::string answer_bundle_to_json(const AnswerBundle& bundle) {
  json evidence = json::array();
  for (const EvaluatedHit& hit : bundle.evidence) {
    evidence.push_back({{"chunk_hash", hit.chunk_hash},
                        {"object_key", hit.object_key},
                        {"semantic", hit.semantic},
                        {"deterministic", hit.deterministic},
                        {"fused", hit.fused},
                        {"final_rank", hit.final_rank}});
  }
  json out;
  out["answer_text"] = bundle.answer_text;
  out["evidence"] = std::move(evidence);
  out["unmatched_report"] = {{"unmatched_hashes", bundle.unmatched_report.unmatched_hashes},
                             {"unmatched_keys", bundle.unmatched_report.unmatched_keys}};
  out["timings"] = {{"retrieve_ms", bundle.timings.retrieve_ms},
                    {"correlate_ms", bundle.timings.correlate_ms},
                    {"evaluate_ms", bundle.timings.evaluate_ms},
                    {"generate_ms", bundle.timings.generate_ms}};
  return out.dump(1);
}

}  // namespace comprag
