#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace comprag {

struct Document {
  std::string doc_id;  // non-empty, unique within a corpus
  std::string text;    // non-empty; rule-based chunking expects object records (JSONL)
  std::map<std::string, std::string> metadata;
};

/// One retrievable unit. Every chunk describes exactly one object
/// (chunk-property relevance); the hash token is its header slot and is a
/// pure function of (object_key, body).
struct ChunkObject {
  std::string hash;         // 32 lowercase hex chars, see assign_hash()
  std::string object_key;   // canonical object name, non-empty
  std::string body;
  std::map<std::string, std::string> properties;
  std::size_t token_count = 0;  // whitespace-token count of body
  std::string source_doc_id;
};

enum class ChunkingStrategy {
  kRuleBased,
  kExternalSynthesizer,
};

struct ChunkingConfig {
  std::size_t target_size = 64;  // whitespace tokens per chunk
  double tolerance = 0.1;        // a chunk may exceed target_size by this fraction
  ChunkingStrategy strategy = ChunkingStrategy::kRuleBased;
};

/// Pluggable chunk producer, the seam where an LLM-backed splitter slots in.
/// Output is re-validated: token counts and hashes are recomputed, the size
/// bound is enforced.
class ChunkSynthesizer {
 public:
  virtual ~ChunkSynthesizer() = default;
  virtual std::vector<ChunkObject> synthesize(const Document& doc,
                                              const ChunkingConfig& cfg) const = 0;
};

/// Splits `text` at ASCII whitespace; token_count is the size of this list.
std::vector<std::string> whitespace_tokens(std::string_view text);

/// Converts a document into chunk-objects.
///
/// Rule-based strategy: `doc.text` is JSONL, one record per line with fields
/// {"object_key": string, "properties": {string: string}, "text": string}.
/// A record renders as one line per property ("key: value", key-sorted) plus
/// the free-text lines, and is split greedily at line boundaries so that
/// every chunk stays within target_size * (1 + tolerance) tokens. All chunks
/// of a record share its object_key.
///
/// Throws MalformedRecord, OversizedAtom, ExternalSynthesizerUnavailable.
std::vector<ChunkObject> chunk_document(const Document& doc, const ChunkingConfig& cfg,
                                        const ChunkSynthesizer* synthesizer = nullptr);

struct RelevanceIssue {
  std::string chunk_hash;
  std::string rule;  // "empty_object_key" | "duplicate_chunk"
  std::string detail;
};

/// Checks the chunk-property relevance contract: every chunk names exactly
/// one non-empty object_key and no two chunks share (object_key, body).
/// Violations are data, not failures — the report is empty iff all is well.
std::vector<RelevanceIssue> validate_relevance(const std::vector<ChunkObject>& chunks);

}  // namespace comprag
