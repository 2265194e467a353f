#include "comprag/index.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "comprag/errors.hpp"
#include "comprag/hash.hpp"

namespace comprag {
namespace {

constexpr char kMagic[8] = {'C', 'P', 'R', 'G', 'I', 'D', 'X', '\n'};
constexpr uint32_t kFormatVersion = 1;

void put_u32(std::string* out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string* out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_str(std::string* out, std::string_view s) {
  put_u64(out, s.size());
  out->append(s);
}

void put_f32(std::string* out, float f) {
  uint32_t bits;
  std::memcpy(&bits, &f, sizeof(bits));
  put_u32(out, bits);
}

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  uint32_t u32() {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(byte()) << (8 * i);
    return v;
  }

  uint64_t u64() {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(byte()) << (8 * i);
    return v;
  }

  std::string str() {
    const uint64_t n = u64();
    if (n > remaining()) fail();
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }

  float f32() {
    const uint32_t bits = u32();
    float f;
    std::memcpy(&f, &bits, sizeof(f));
    return f;
  }

  size_t remaining() const { return data_.size() - pos_; }

 private:
  unsigned char byte() {
    if (pos_ >= data_.size()) fail();
    return static_cast<unsigned char>(data_[pos_++]);
  }

  [[noreturn]] static void fail() { throw CorruptIndex("index file is truncated"); }

  std::string_view data_;
  size_t pos_ = 0;
};

std::string serialize_payload(const CorpusIndex& index) {
  std::string payload;
  put_u32(&payload, kFormatVersion);
  put_u32(&payload, static_cast<uint32_t>(index.dim));
  put_str(&payload, index.embedder_fingerprint);
  put_u64(&payload, index.chunks.size());
  for (const auto& [hash, chunk] : index.chunks) {
    put_str(&payload, hash);
    put_str(&payload, chunk.object_key);
    put_str(&payload, chunk.body);
    put_str(&payload, chunk.source_doc_id);
    put_u64(&payload, chunk.token_count);
    put_u64(&payload, chunk.properties.size());
    for (const auto& [key, value] : chunk.properties) {
      put_str(&payload, key);
      put_str(&payload, value);
    }
    const EmbeddingVector& vec = index.vectors.at(hash);
    for (float f : vec) put_f32(&payload, f);
  }
  return payload;
}

}  // namespace

CorpusIndex build_index(const std::vector<ChunkObject>& chunks, const Embedder& embedder) {
  const auto issues = validate_relevance(chunks);
  if (!issues.empty()) {
    throw RelevanceViolation("chunks violate the relevance contract: " + issues.front().rule +
                             " (" + issues.front().detail + ")");
  }

  CorpusIndex index;
  index.dim = embedder.dim();
  index.embedder_fingerprint = embedder.fingerprint();

  std::vector<std::string> bodies;
  bodies.reserve(chunks.size());
  for (const ChunkObject& chunk : chunks) {
    if (index.chunks.count(chunk.hash) != 0) {
      throw DuplicateHash("duplicate chunk hash " + chunk.hash);
    }
    index.chunks.emplace(chunk.hash, chunk);
    bodies.push_back(chunk.body);
  }

  const auto vectors = embedder.embed_batch(bodies);
  size_t i = 0;
  for (const ChunkObject& chunk : chunks) {
    index.vectors.emplace(chunk.hash, vectors[i++]);
  }
  return index;
}

std::vector<SemanticHit> retrieve(const CorpusIndex& index, const Embedder& embedder,
                                  std::string_view query, std::size_t k) {
  if (k < 1) throw std::invalid_argument("retrieval depth k must be >= 1");
  if (embedder.fingerprint() != index.embedder_fingerprint) {
    throw FingerprintMismatch("index was built with '" + index.embedder_fingerprint +
                              "' but the active embedder is '" + embedder.fingerprint() + "'");
  }
  if (index.empty()) return {};

  const EmbeddingVector q = embedder.embed(query);
  std::vector<SemanticHit> hits;
  hits.reserve(index.size());
  for (const auto& [hash, vec] : index.vectors) {
    hits.push_back(SemanticHit{hash, cosine_similarity(q, vec)});
  }
  const auto better = [](const SemanticHit& a, const SemanticHit& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.chunk_hash < b.chunk_hash;
  };
  const size_t n = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + n, hits.end(), better);
  hits.resize(n);
  return hits;
}

void save_index(const CorpusIndex& index, const std::filesystem::path& path) {
  const std::string payload = serialize_payload(index);
  const Hash128 checksum = murmur3_x64_128(payload.data(), payload.size(), 0);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open index file for writing: " + path.string());
  out.write(kMagic, sizeof(kMagic));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  std::string footer;
  put_u64(&footer, checksum.h1);
  put_u64(&footer, checksum.h2);
  out.write(footer.data(), static_cast<std::streamsize>(footer.size()));
  out.close();
  if (!out) throw Error("failed to write index file: " + path.string());
}

CorpusIndex load_index(const std::filesystem::path& path, std::string_view expected_fingerprint) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open index file: " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (data.size() < sizeof(kMagic) + 16 ||
      std::memcmp(data.data(), kMagic, sizeof(kMagic)) != 0) {
    throw CorruptIndex("not an index file: " + path.string());
  }
  const std::string_view payload(data.data() + sizeof(kMagic),
                                 data.size() - sizeof(kMagic) - 16);
  Reader footer(std::string_view(data).substr(data.size() - 16));
  const Hash128 stored{footer.u64(), footer.u64()};
  const Hash128 actual = murmur3_x64_128(payload.data(), payload.size(), 0);
  if (!(stored == actual)) {
    throw CorruptIndex("index checksum mismatch: " + path.string());
  }

  Reader r(payload);
  const uint32_t version = r.u32();
  if (version != kFormatVersion) {
    throw CorruptIndex("unsupported index format version " + std::to_string(version));
  }

  CorpusIndex index;
  index.dim = r.u32();
  index.embedder_fingerprint = r.str();
  if (!expected_fingerprint.empty() && index.embedder_fingerprint != expected_fingerprint) {
    throw FingerprintMismatch("index was built with '" + index.embedder_fingerprint +
                              "' but the active configuration expects '" +
                              std::string(expected_fingerprint) + "'");
  }

  const uint64_t count = r.u64();
  for (uint64_t i = 0; i < count; ++i) {
    ChunkObject chunk;
    const std::string hash = r.str();
    chunk.hash = hash;
    chunk.object_key = r.str();
    chunk.body = r.str();
    chunk.source_doc_id = r.str();
    chunk.token_count = r.u64();
    const uint64_t props = r.u64();
    for (uint64_t p = 0; p < props; ++p) {
      std::string key = r.str();
      chunk.properties[std::move(key)] = r.str();
    }
    EmbeddingVector vec;
    vec.reserve(index.dim);
    for (size_t d = 0; d < index.dim; ++d) vec.push_back(r.f32());
    index.chunks.emplace(hash, std::move(chunk));
    index.vectors.emplace(hash, std::move(vec));
  }
  if (r.remaining() != 0) throw CorruptIndex("index file has trailing bytes");
  return index;
}

std::string export_index_json(const CorpusIndex& index) {
  nlohmann::json out;
  out["format_version"] = kFormatVersion;
  out["dim"] = index.dim;
  out["embedder_fingerprint"] = index.embedder_fingerprint;
  nlohmann::json chunks = nlohmann::json::array();
  for (const auto& [hash, chunk] : index.chunks) {
    nlohmann::json item;
    item["hash"] = hash;
    item["object_key"] = chunk.object_key;
    item["body"] = chunk.body;
    item["properties"] = chunk.properties;
    item["token_count"] = chunk.token_count;
    item["source_doc_id"] = chunk.source_doc_id;
    item["vector"] = index.vectors.at(hash);
    chunks.push_back(std::move(item));
  }
  out["chunks"] = std::move(chunks);
  return out.dump(2);
}

}  // namespace comprag
