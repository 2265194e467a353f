#include <doctest.h>

#include <set>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "comprag/errors.hpp"
#include "comprag/hash.hpp"
#include "comprag/pipeline.hpp"
#include "support/oracles.hpp"

using namespace comprag;
using nlohmann::json;

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

struct Fixture {
  Fixture() {
    std::vector<ChunkObject> chunks = {
        make_chunk("Gio's", "name: Gio's\ncuisine: italian pasta pizza"),
        make_chunk("Sakura", "name: Sakura\ncuisine: japanese sushi rice"),
        make_chunk("Burger Barn", "name: Burger Barn\ncuisine: american burgers fries"),
    };
    index = build_index(chunks, embedder);
    flist = make_filtration({{"Gio's", 0.8}, {"Sakura", 0.9}, {"Burger Barn", 0.2}});
  }

  HashingTfEmbedder embedder{64};
  CorpusIndex index;
  FiltrationList flist;
  TemplateGenerator generator;
};

void check_grounded(const AnswerBundle& bundle) {
  std::set<std::string> evidence_hashes;
  for (const EvaluatedHit& hit : bundle.evidence) evidence_hashes.insert(hit.chunk_hash);
  for (const std::string& token : extract_hash_tokens(bundle.answer_text)) {
    CHECK(evidence_hashes.count(token) == 1);
  }
}

}  // namespace

TEST_CASE("empty index answers with the declared refusal") {
  HashingTfEmbedder embedder{64};
  const CorpusIndex empty = build_index({}, embedder);
  QueryRequest req{"anything at all", 5, {}};

  const AnswerBundle bundle = answer(empty, embedder, FiltrationList{}, req, TemplateGenerator{});
  CHECK(bundle.answer_text == kNoSupportedAnswer);
  CHECK(bundle.evidence.empty());
  CHECK(extract_hash_tokens(bundle.answer_text).empty());
}

TEST_CASE("pass_through evidence equals raw retrieval order") {
  Fixture f;
  QueryRequest req{"italian pasta", 3,
                   {EvaluatorMode::kPassThrough, 0.5, std::nullopt, MissingPolicy::kKeepSemantic}};
  const AnswerBundle bundle = answer(f.index, f.embedder, f.flist, req, f.generator);

  const auto hits = retrieve(f.index, f.embedder, "italian pasta", 3);
  REQUIRE(bundle.evidence.size() == hits.size());
  for (size_t i = 0; i < hits.size(); ++i) {
    CHECK(bundle.evidence[i].chunk_hash == hits[i].chunk_hash);
    CHECK(bundle.evidence[i].semantic == hits[i].similarity);
  }
  check_grounded(bundle);
}

TEST_CASE("answer composes retrieve, correlate and evaluate") {
  Fixture f;
  QueryRequest req{"sushi rice", 3, {EvaluatorMode::kFuse, 0.4, std::nullopt, MissingPolicy::kDrop}};
  const AnswerBundle bundle = answer(f.index, f.embedder, f.flist, req, f.generator);

  const auto manual = evaluate(retrieve(f.index, f.embedder, "sushi rice", 3),
                               correlate(f.index, f.flist), f.flist, req.policy);
  REQUIRE(bundle.evidence.size() == manual.size());
  for (size_t i = 0; i < manual.size(); ++i) {
    CHECK(bundle.evidence[i].chunk_hash == manual[i].chunk_hash);
    CHECK(bundle.evidence[i].fused == manual[i].fused);
    CHECK(bundle.evidence[i].final_rank == manual[i].final_rank);
  }
}

TEST_CASE("answer is deterministic") {
  Fixture f;
  QueryRequest req{"italian food", 3, {}};
  const AnswerBundle a = answer(f.index, f.embedder, f.flist, req, f.generator);
  const AnswerBundle b = answer(f.index, f.embedder, f.flist, req, f.generator);
  CHECK(a.answer_text == b.answer_text);
  REQUIRE(a.evidence.size() == b.evidence.size());
  for (size_t i = 0; i < a.evidence.size(); ++i) {
    CHECK(a.evidence[i].chunk_hash == b.evidence[i].chunk_hash);
    CHECK(a.evidence[i].fused == b.evidence[i].fused);
  }
}

TEST_CASE("unmatched chunks and keys are reported") {
  Fixture f;
  const FiltrationList partial = make_filtration({{"Gio's", 0.8}, {"Phantom Diner", 0.5}});
  QueryRequest req{"italian", 3, {EvaluatorMode::kFuse, 0.5, std::nullopt, MissingPolicy::kKeepZero}};
  const AnswerBundle bundle = answer(f.index, f.embedder, partial, req, f.generator);

  CHECK(bundle.unmatched_report.unmatched_hashes.size() == 2);  // Sakura, Burger Barn
  REQUIRE(bundle.unmatched_report.unmatched_keys.size() == 1);
  CHECK(bundle.unmatched_report.unmatched_keys[0] == "Phantom Diner");
}

TEST_CASE("template generator cites every evidence item in order") {
  Fixture f;

  SUBCASE("empty evidence") {
    CHECK(TemplateGenerator{}.generate("q", {}, f.index) == kNoSupportedAnswer);
  }

  SUBCASE("single item") {
    QueryRequest req{"italian pasta pizza", 1, {}};
    const AnswerBundle bundle = answer(f.index, f.embedder, f.flist, req, f.generator);
    REQUIRE(bundle.evidence.size() == 1);
    CHECK(bundle.evidence[0].object_key == "Gio's");
    CHECK(bundle.answer_text.find("Gio's") != std::string::npos);
    CHECK(bundle.answer_text.find(bundle.evidence[0].chunk_hash) != std::string::npos);
  }

  SUBCASE("three items appear in evidence order") {
    QueryRequest req{"italian sushi burgers", 3,
                     {EvaluatorMode::kFuse, 0.5, std::nullopt, MissingPolicy::kKeepSemantic}};
    const AnswerBundle bundle = answer(f.index, f.embedder, f.flist, req, f.generator);
    REQUIRE(bundle.evidence.size() == 3);
    // string-scan oracle: object keys occur at strictly increasing offsets
    size_t previous = 0;
    for (const EvaluatedHit& hit : bundle.evidence) {
      const size_t at = bundle.answer_text.find(hit.object_key, previous);
      REQUIRE(at != std::string::npos);
      previous = at + 1;
    }
    check_grounded(bundle);
  }
}

TEST_CASE("extract_hash_tokens matches only the fixed-width pattern") {
  const std::string h = assign_hash("A", "b");
  CHECK(extract_hash_tokens("cites [" + h + "] here") == std::vector<std::string>{h});
  CHECK(extract_hash_tokens(h + " " + h).size() == 2);
  CHECK(extract_hash_tokens("deadbeef").empty());                  // too short
  CHECK(extract_hash_tokens(h + "0").empty());                     // 33 hex chars
  CHECK(extract_hash_tokens("x" + h + "y") == std::vector<std::string>{h});
}

TEST_CASE("a generator citing unknown hashes is a grounding violation") {
  Fixture f;

  class RogueGenerator final : public Generator {
   public:
    std::string generate(std::string_view, const std::vector<EvaluatedHit>&,
                         const CorpusIndex&) const override {
      return "I recommend [" + assign_hash("Fabricated", "not in evidence") + "]";
    }
  };

  QueryRequest req{"italian", 2, {}};
  CHECK_THROWS_AS(answer(f.index, f.embedder, f.flist, req, RogueGenerator{}),
                  GroundingViolation);
}

TEST_CASE("invalid requests are rejected") {
  Fixture f;
  CHECK_THROWS_AS(answer(f.index, f.embedder, f.flist, QueryRequest{"", 3, {}}, f.generator),
                  std::invalid_argument);
  CHECK_THROWS_AS(answer(f.index, f.embedder, f.flist, QueryRequest{"q", 0, {}}, f.generator),
                  std::invalid_argument);
  QueryRequest bad_policy{"q", 3, {EvaluatorMode::kFuse, 7.0, std::nullopt, MissingPolicy::kDrop}};
  CHECK_THROWS_AS(answer(f.index, f.embedder, f.flist, bad_policy, f.generator), PolicyInvalid);
}

TEST_CASE("answer bundle json round-trips through a strict parser") {
  Fixture f;
  QueryRequest req{"italian food nearby", 3, {}};
  const AnswerBundle bundle = answer(f.index, f.embedder, f.flist, req, f.generator);

  const json doc = json::parse(answer_bundle_to_json(bundle));
  CHECK(doc["answer_text"] == bundle.answer_text);
  REQUIRE(doc["evidence"].size() == bundle.evidence.size());
  for (size_t i = 0; i < bundle.evidence.size(); ++i) {
    CHECK(doc["evidence"][i]["chunk_hash"] == bundle.evidence[i].chunk_hash);
    CHECK(doc["evidence"][i]["object_key"] == bundle.evidence[i].object_key);
    CHECK(doc["evidence"][i]["semantic"].get<double>() == bundle.evidence[i].semantic);
    CHECK(doc["evidence"][i]["fused"].get<double>() == bundle.evidence[i].fused);
    CHECK(doc["evidence"][i]["final_rank"].get<size_t>() == bundle.evidence[i].final_rank);
  }
  CHECK(doc["timings"]["retrieve_ms"].is_number());
  CHECK(doc["unmatched_report"]["unmatched_hashes"].is_array());
}

namespace {

class GenService {
 public:
  explicit GenService(bool misbehave = false) {
    server_.Post("/generate", [misbehave](const httplib::Request& req, httplib::Response& res) {
      const json body = json::parse(req.body);
      std::string answer = "Remote answer for: " + body["query"].get<std::string>() + "\n";
      for (const auto& item : body["evidence"]) {
        answer += "- " + item["object_key"].get<std::string>() + " [" +
                  item["hash"].get<std::string>() + "]\n";
      }
      if (misbehave) answer += "also see [00112233445566778899aabbccddeeff]";
      res.set_content(json{{"answer", answer}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~GenService() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/generate"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_CASE("remote generator speaks the wire protocol and stays grounded") {
  Fixture f;
  GenService service;
  RemoteGenerator remote(service.url());

  QueryRequest req{"italian pasta", 2, {}};
  const AnswerBundle bundle = answer(f.index, f.embedder, f.flist, req, remote);
  CHECK(bundle.answer_text.find("Remote answer for: italian pasta") != std::string::npos);
  check_grounded(bundle);

  // evidence bodies travel to the service
  for (const EvaluatedHit& hit : bundle.evidence) {
    CHECK(bundle.answer_text.find(hit.chunk_hash) != std::string::npos);
  }
}

TEST_CASE("a misbehaving remote generator trips the grounding check") {
  Fixture f;
  GenService service(/*misbehave=*/true);
  RemoteGenerator remote(service.url());
  QueryRequest req{"italian pasta", 2, {}};
  CHECK_THROWS_AS(answer(f.index, f.embedder, f.flist, req, remote), GroundingViolation);
}

TEST_CASE("unreachable generation service raises GeneratorUnavailable") {
  Fixture f;
  RemoteGenerator remote("http://127.0.0.1:1/generate", /*timeout_ms=*/200);
  QueryRequest req{"italian pasta", 2, {}};
  CHECK_THROWS_AS(answer(f.index, f.embedder, f.flist, req, remote), GeneratorUnavailable);
}
