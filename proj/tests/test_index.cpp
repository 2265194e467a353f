#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "comprag/errors.hpp"
#include "comprag/hash.hpp"
#include "comprag/index.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace comprag;

namespace {

ChunkObject make_chunk(const std::string& key, const std::string& body) {
  ChunkObject c;
  c.object_key = key;
  c.body = body;
  c.token_count = whitespace_tokens(body).size();
  c.hash = assign_hash(key, body);
  c.source_doc_id = "test";
  return c;
}

std::vector<ChunkObject> random_chunks(std::mt19937& rng, size_t count) {
  static const char* kWords[] = {"pasta", "pizza", "sushi", "taco",  "curry", "bagel",
                                 "salad", "soup",  "bread", "cheese", "wine",  "olive"};
  std::vector<ChunkObject> chunks;
  std::set<std::string> seen;
  while (chunks.size() < count) {
    std::string body;
    const size_t len = 3 + rng() % 10;
    for (size_t i = 0; i < len; ++i) {
      if (i) body += ' ';
      body += kWords[rng() % 12];
      body += std::to_string(rng() % 50);
    }
    const std::string key = "obj" + std::to_string(chunks.size());
    if (!seen.insert(body).second) continue;
    chunks.push_back(make_chunk(key, body));
  }
  return chunks;
}

std::string file_bytes(const std::filesystem::path& p) { return test::read_file(p); }

struct TempDir {
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("comprag_test_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::filesystem::path path;
};

}  // namespace

TEST_CASE("build_index over zero chunks keeps the configured dim") {
  HashingTfEmbedder embedder(128);
  const CorpusIndex index = build_index({}, embedder);
  CHECK(index.empty());
  CHECK(index.dim == 128);
  CHECK(index.embedder_fingerprint == embedder.fingerprint());
}

TEST_CASE("build_index embeds every chunk with matching key sets") {
  HashingTfEmbedder embedder(64);
  const auto chunks = std::vector<ChunkObject>{make_chunk("A", "alpha beta"),
                                               make_chunk("B", "gamma delta"),
                                               make_chunk("C", "epsilon zeta")};
  const CorpusIndex index = build_index(chunks, embedder);
  CHECK(index.size() == 3);
  for (const auto& [hash, chunk] : index.chunks) {
    REQUIRE(index.vectors.count(hash) == 1);
    CHECK(index.vectors.at(hash) == embedder.embed(chunk.body));
    CHECK(index.vectors.at(hash).size() == 64);
  }
}

TEST_CASE("build_index rejects duplicate hashes and relevance violations") {
  HashingTfEmbedder embedder(16);
  const auto chunk = make_chunk("A", "alpha beta");
  CHECK_THROWS_AS(build_index({chunk, chunk}, embedder), RelevanceViolation);

  ChunkObject nameless = make_chunk("", "some body");
  CHECK_THROWS_AS(build_index({nameless}, embedder), RelevanceViolation);

  // same hash, different body: relevance-clean but structurally impossible
  ChunkObject a = make_chunk("A", "alpha");
  ChunkObject b = make_chunk("A", "beta");
  b.hash = a.hash;
  CHECK_THROWS_AS(build_index({a, b}, embedder), DuplicateHash);
}

TEST_CASE("retrieve finds the chunk whose body equals the query") {
  HashingTfEmbedder embedder;
  const auto chunks = std::vector<ChunkObject>{make_chunk("A", "alpha beta gamma"),
                                               make_chunk("B", "delta epsilon"),
                                               make_chunk("C", "zeta eta theta")};
  const CorpusIndex index = build_index(chunks, embedder);

  const auto hits = retrieve(index, embedder, "delta epsilon", 3);
  REQUIRE(hits.size() == 3);
  CHECK(hits[0].chunk_hash == chunks[1].hash);
  CHECK(hits[0].similarity == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("retrieve caps k at the corpus size and needs k >= 1") {
  HashingTfEmbedder embedder;
  std::mt19937 rng(3);
  const CorpusIndex index = build_index(random_chunks(rng, 4), embedder);
  CHECK(retrieve(index, embedder, "pasta", 10).size() == 4);
  CHECK_THROWS_AS(retrieve(index, embedder, "pasta", 0), std::invalid_argument);
  const CorpusIndex empty = build_index({}, embedder);
  CHECK(retrieve(empty, embedder, "pasta", 5).empty());
}

TEST_CASE("retrieve matches the brute-force oracle on a random corpus") {
  HashingTfEmbedder embedder;
  std::mt19937 rng(11);
  const CorpusIndex index = build_index(random_chunks(rng, 50), embedder);

  for (const char* query : {"pasta pizza", "wine cheese bread", "sushi0 taco1"}) {
    const auto expected = comprag::test::brute_force_topk(index, embedder.embed(query), 5);
    const auto actual = retrieve(index, embedder, query, 5);
    REQUIRE(actual.size() == expected.size());
    for (size_t i = 0; i < actual.size(); ++i) {
      CHECK(actual[i].chunk_hash == expected[i].chunk_hash);
      CHECK(actual[i].similarity == expected[i].similarity);
    }
  }
}

TEST_CASE("ties break by ascending chunk hash") {
  HashingTfEmbedder embedder(32);
  // identical bodies under different keys embed identically: sims tie exactly
  const auto chunks = std::vector<ChunkObject>{
      make_chunk("A", "same body text"), make_chunk("B", "same body text"),
      make_chunk("C", "same body text"), make_chunk("D", "unrelated words entirely")};
  const CorpusIndex index = build_index(chunks, embedder);
  const auto hits = retrieve(index, embedder, "same body text", 4);
  REQUIRE(hits.size() == 4);
  CHECK(hits[0].similarity == hits[1].similarity);
  CHECK(hits[1].similarity == hits[2].similarity);
  CHECK(hits[0].chunk_hash < hits[1].chunk_hash);
  CHECK(hits[1].chunk_hash < hits[2].chunk_hash);
}

TEST_CASE("retrieve rejects a mismatched embedder") {
  HashingTfEmbedder builder(64);
  HashingTfEmbedder other(128);
  std::mt19937 rng(5);
  const CorpusIndex index = build_index(random_chunks(rng, 3), builder);
  CHECK_THROWS_AS(retrieve(index, other, "pasta", 2), FingerprintMismatch);
}

TEST_CASE("save/load round-trip is observationally identical") {
  TempDir tmp;
  HashingTfEmbedder embedder;
  std::mt19937 rng(17);
  const CorpusIndex index = build_index(random_chunks(rng, 20), embedder);

  const auto path = tmp.path / "corpus.idx";
  save_index(index, path);
  const CorpusIndex loaded = load_index(path, embedder.fingerprint());

  CHECK(loaded.dim == index.dim);
  CHECK(loaded.embedder_fingerprint == index.embedder_fingerprint);
  REQUIRE(loaded.size() == index.size());
  for (const auto& [hash, chunk] : index.chunks) {
    REQUIRE(loaded.chunks.count(hash) == 1);
    const ChunkObject& lc = loaded.chunks.at(hash);
    CHECK(lc.object_key == chunk.object_key);
    CHECK(lc.body == chunk.body);
    CHECK(lc.properties == chunk.properties);
    CHECK(lc.token_count == chunk.token_count);
    CHECK(lc.source_doc_id == chunk.source_doc_id);
    CHECK(loaded.vectors.at(hash) == index.vectors.at(hash));  // float-exact
  }

  // identical query answers
  const auto before = retrieve(index, embedder, "pasta pizza wine", 7);
  const auto after = retrieve(loaded, embedder, "pasta pizza wine", 7);
  REQUIRE(before.size() == after.size());
  for (size_t i = 0; i < before.size(); ++i) {
    CHECK(before[i].chunk_hash == after[i].chunk_hash);
    CHECK(before[i].similarity == after[i].similarity);
  }
}

TEST_CASE("rebuilds and re-saves are byte-identical") {
  TempDir tmp;
  HashingTfEmbedder embedder;
  std::mt19937 rng_a(23);
  std::mt19937 rng_b(23);
  const CorpusIndex a = build_index(random_chunks(rng_a, 15), embedder);
  const CorpusIndex b = build_index(random_chunks(rng_b, 15), embedder);

  save_index(a, tmp.path / "a.idx");
  save_index(b, tmp.path / "b.idx");
  CHECK(file_bytes(tmp.path / "a.idx") == file_bytes(tmp.path / "b.idx"));

  const CorpusIndex loaded = load_index(tmp.path / "a.idx");
  save_index(loaded, tmp.path / "c.idx");
  CHECK(file_bytes(tmp.path / "a.idx") == file_bytes(tmp.path / "c.idx"));
}

TEST_CASE("truncated and corrupted files raise CorruptIndex") {
  TempDir tmp;
  HashingTfEmbedder embedder;
  std::mt19937 rng(29);
  save_index(build_index(random_chunks(rng, 5), embedder), tmp.path / "x.idx");
  const std::string bytes = file_bytes(tmp.path / "x.idx");

  {
    std::ofstream out(tmp.path / "trunc.idx", std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
  }
  CHECK_THROWS_AS(load_index(tmp.path / "trunc.idx"), CorruptIndex);

  {
    std::string flipped = bytes;
    flipped[bytes.size() / 2] ^= 0x01;
    std::ofstream out(tmp.path / "flip.idx", std::ios::binary);
    out.write(flipped.data(), static_cast<std::streamsize>(flipped.size()));
  }
  CHECK_THROWS_AS(load_index(tmp.path / "flip.idx"), CorruptIndex);

  {
    std::ofstream out(tmp.path / "other.bin", std::ios::binary);
    out << "not an index at all";
  }
  CHECK_THROWS_AS(load_index(tmp.path / "other.bin"), CorruptIndex);
}

TEST_CASE("fingerprint mismatch on load is rejected") {
  TempDir tmp;
  HashingTfEmbedder a(64);
  HashingTfEmbedder b(256);
  std::mt19937 rng(31);
  save_index(build_index(random_chunks(rng, 3), a), tmp.path / "a.idx");

  CHECK_THROWS_AS(load_index(tmp.path / "a.idx", b.fingerprint()), FingerprintMismatch);
  CHECK_NOTHROW(load_index(tmp.path / "a.idx", a.fingerprint()));
  CHECK_NOTHROW(load_index(tmp.path / "a.idx"));  // no expectation, no check
}

TEST_CASE("json export carries the whole index") {
  HashingTfEmbedder embedder(8);
  const auto chunks = std::vector<ChunkObject>{make_chunk("A", "alpha beta")};
  const CorpusIndex index = build_index(chunks, embedder);
  const auto doc = nlohmann::json::parse(export_index_json(index));
  CHECK(doc["dim"] == 8);
  CHECK(doc["embedder_fingerprint"] == embedder.fingerprint());
  REQUIRE(doc["chunks"].size() == 1);
  CHECK(doc["chunks"][0]["hash"] == chunks[0].hash);
  CHECK(doc["chunks"][0]["vector"].size() == 8);
}
