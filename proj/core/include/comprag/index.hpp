#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "comprag/chunker.hpp"
#include "comprag/embedder.hpp"

namespace comprag {

struct SemanticHit {
  std::string chunk_hash;
  double similarity = 0.0;  // cosine, in [-1, 1]
};

/// Immutable after build: chunks and vectors share the same key set (chunk
/// hashes), all vectors share dim, and the fingerprint names the embedder
/// that produced them. Concurrent reads need no coordination.
struct CorpusIndex {
  std::map<std::string, ChunkObject> chunks;
  std::map<std::string, EmbeddingVector> vectors;
  std::string embedder_fingerprint;
  std::size_t dim = 0;

  std::size_t size() const { return chunks.size(); }
  bool empty() const { return chunks.empty(); }
};

/// Embeds every chunk on its body text. The chunk list must already satisfy
/// the relevance contract. Throws DuplicateHash, RelevanceViolation.
CorpusIndex build_index(const std::vector<ChunkObject>& chunks, const Embedder& embedder);

/// Exhaustive top-k by cosine similarity; returns min(k, corpus size) hits
/// ordered by descending similarity, ties by ascending chunk hash. The
/// embedder must match the index fingerprint.
std::vector<SemanticHit> retrieve(const CorpusIndex& index, const Embedder& embedder,
                                  std::string_view query, std::size_t k);

/// Single binary file: magic, version, payload, 128-bit checksum. Identical
/// indexes serialize to identical bytes.
void save_index(const CorpusIndex& index, const std::filesystem::path& path);

/// Throws CorruptIndex on checksum/structure failure. When
/// `expected_fingerprint` is non-empty, a mismatching index is rejected with
/// FingerprintMismatch.
CorpusIndex load_index(const std::filesystem::path& path,
                       std::string_view expected_fingerprint = {});

/// Human-inspectable JSON dump of the whole index.
std::string export_index_json(const CorpusIndex& index);

}  // namespace comprag
