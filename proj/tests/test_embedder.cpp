#include <doctest.h>

#include <cmath>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "comprag/embedder.hpp"
#include "comprag/errors.hpp"
#include "support/oracles.hpp"

using namespace comprag;
using nlohmann::json;

TEST_CASE("embedding is deterministic") {
  HashingTfEmbedder embedder(256);
  const auto a = embedder.embed("the quick brown fox");
  const auto b = embedder.embed("the quick brown fox");
  CHECK(a == b);
  CHECK(a.size() == 256);
}

TEST_CASE("embeddings are unit-norm") {
  HashingTfEmbedder embedder(64);
  for (const char* text : {"a", "a b c", "repeated repeated repeated", "Unicode café text"}) {
    const auto v = embedder.embed(text);
    double norm = 0.0;
    for (float x : v) norm += double(x) * double(x);
    CHECK(std::abs(std::sqrt(norm) - 1.0) < 1e-6);
  }
}

TEST_CASE("embedding empty text is a contract violation") {
  HashingTfEmbedder embedder;
  CHECK_THROWS_AS(embedder.embed(""), std::invalid_argument);
}

TEST_CASE("embed_tokens lowercases and splits on punctuation") {
  const auto tokens = embed_tokens("What are the best options for Italian food nearby?");
  REQUIRE(tokens.size() == 9);
  CHECK(tokens[6] == "italian");
  CHECK(tokens[8] == "nearby");
  CHECK(embed_tokens("Gio's") == std::vector<std::string>{"gio", "s"});
}

TEST_CASE("disjoint vocabularies are orthogonal in reference mode") {
  const std::string a = "alpha beta gamma";
  const std::string b = "delta epsilon zeta";
  const auto bow = BowReferenceEmbedder::from_texts({a, b});

  const auto va = bow.embed(a);
  const auto vb = bow.embed(b);
  CHECK(cosine_similarity(va, vb) == doctest::Approx(0.0).epsilon(1e-12));

  // independent check: bag-of-words dot product is exactly zero
  CHECK(comprag::test::bow_dot_oracle(a, b) == 0.0);

  // shared vocabulary is not orthogonal
  const auto overlap = BowReferenceEmbedder::from_texts({"alpha beta", "alpha gamma"});
  CHECK(cosine_similarity(overlap.embed("alpha beta"), overlap.embed("alpha gamma")) > 0.0);
  CHECK(comprag::test::bow_dot_oracle("alpha beta", "alpha gamma") > 0.0);
}

TEST_CASE("bow reference mode agrees with the dot-product oracle") {
  const std::vector<std::string> corpus = {
      "roma pasta fresh basil", "sushi rice fish", "pasta pizza oven", "fresh fish market"};
  const auto bow = BowReferenceEmbedder::from_texts(corpus);
  for (const auto& a : corpus) {
    for (const auto& b : corpus) {
      const double lib = cosine_similarity(bow.embed(a), bow.embed(b));
      const double na = std::sqrt(comprag::test::bow_dot_oracle(a, a));
      const double nb = std::sqrt(comprag::test::bow_dot_oracle(b, b));
      const double expected = comprag::test::bow_dot_oracle(a, b) / (na * nb);
      CHECK(lib == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("cosine is symmetric and bounded") {
  HashingTfEmbedder embedder(32);
  const std::vector<std::string> texts = {"a b c", "c d e", "a a a", "x y", "a b c d e f"};
  for (const auto& s : texts) {
    for (const auto& t : texts) {
      const double st = cosine_similarity(embedder.embed(s), embedder.embed(t));
      const double ts = cosine_similarity(embedder.embed(t), embedder.embed(s));
      CHECK(st == ts);  // bit-for-bit
      CHECK(st >= -1.0 - 1e-9);
      CHECK(st <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("fingerprints identify the configuration") {
  CHECK(HashingTfEmbedder(256).fingerprint() == HashingTfEmbedder(256).fingerprint());
  CHECK(HashingTfEmbedder(256).fingerprint() != HashingTfEmbedder(128).fingerprint());
  const auto a = BowReferenceEmbedder::from_texts({"a b"});
  const auto b = BowReferenceEmbedder::from_texts({"a c"});
  CHECK(a.fingerprint() != b.fingerprint());
}

namespace {

// In-process embedding service speaking the wire protocol.
class EmbedService {
 public:
  explicit EmbedService(std::size_t dim, bool wrong_dim = false) {
    server_.Post("/embed", [dim, wrong_dim](const httplib::Request& req, httplib::Response& res) {
      const auto body = json::parse(req.body);
      json vectors = json::array();
      for (const auto& text : body["texts"]) {
        // arbitrary but deterministic: byte sum spread over the dimensions
        const std::string s = text.get<std::string>();
        std::vector<double> v(wrong_dim ? dim + 1 : dim, 0.0);
        for (size_t i = 0; i < s.size(); ++i) v[i % v.size()] += double((unsigned char)s[i]);
        vectors.push_back(v);
      }
      res.set_content(json{{"vectors", vectors}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~EmbedService() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/embed"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_CASE("remote embedder speaks the wire protocol") {
  EmbedService service(8);
  RemoteEmbedder remote(service.url(), 8);

  const auto v = remote.embed("hello");
  CHECK(v.size() == 8);
  CHECK(remote.embed("hello") == v);  // service is deterministic, client is transparent

  const auto batch = remote.embed_batch({"one", "two", "three"});
  REQUIRE(batch.size() == 3);
  CHECK(batch[0] == remote.embed("one"));
}

TEST_CASE("remote embedder reports a wrong-length vector") {
  EmbedService service(8, /*wrong_dim=*/true);
  RemoteEmbedder remote(service.url(), 8);
  CHECK_THROWS_AS(remote.embed("hello"), DimensionMismatch);
}

TEST_CASE("unreachable embedding service raises EmbedderUnavailable") {
  RemoteEmbedder remote("http://127.0.0.1:1/embed", 8, /*timeout_ms=*/200);
  CHECK_THROWS_AS(remote.embed("hello"), EmbedderUnavailable);
}
