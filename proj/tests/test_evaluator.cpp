#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "comprag/canon.hpp"
#include "comprag/errors.hpp"
#include "comprag/evaluator.hpp"
#include "comprag/hash.hpp"
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

CorpusIndex index_of(const std::vector<std::pair<std::string, std::string>>& key_bodies) {
  std::vector<ChunkObject> chunks;
  for (const auto& [key, body] : key_bodies) chunks.push_back(make_chunk(key, body));
  HashingTfEmbedder embedder(16);
  return build_index(chunks, embedder);
}

}  // namespace

TEST_CASE("correlate binds all chunks of an object to its single entry") {
  const CorpusIndex index = index_of(
      {{"Gio's", "menu: pasta"}, {"Gio's", "menu: pizza"}, {"Gio's", "menu: tiramisu"}});
  const FiltrationList flist = make_filtration({{"Gio's", 0.9}});

  const CorrelationMap cmap = correlate(index, flist);
  CHECK(cmap.bindings.size() == 3);
  CHECK(cmap.unmatched_hashes.empty());
  CHECK(cmap.unmatched_keys.empty());
  for (const auto& [hash, binding] : cmap.bindings) {
    CHECK(binding.object_key == "Gio's");
    CHECK(binding.rank == 1);
    CHECK(binding.score == 0.9);
  }
}

TEST_CASE("correlate with an empty filtration leaves everything unmatched") {
  const CorpusIndex index = index_of({{"A", "body a"}, {"B", "body b"}});
  const CorrelationMap cmap = correlate(index, FiltrationList{});
  CHECK(cmap.bindings.empty());
  CHECK(cmap.unmatched_hashes.size() == 2);
  CHECK(cmap.unmatched_keys.empty());
}

TEST_CASE("correlate canonicalizes keys before matching") {
  const CorpusIndex index = index_of({{"Gio's", "menu: pasta"}});
  const FiltrationList flist = make_filtration({{"  gio's ", 0.7}});

  const CorrelationMap cmap = correlate(index, flist);
  REQUIRE(cmap.bindings.size() == 1);
  CHECK(cmap.bindings.begin()->second.object_key == "  gio's ");
  CHECK(cmap.unmatched_keys.empty());

  // and the canonicalizer itself agrees on the pair
  CHECK(canon::canonical_key("  gio's ") == canon::canonical_key("Gio's"));
}

TEST_CASE("correlate reports entries with no chunks") {
  const CorpusIndex index = index_of({{"A", "body a"}});
  const FiltrationList flist = make_filtration({{"A", 0.5}, {"Ghost", 0.9}});
  const CorrelationMap cmap = correlate(index, flist);
  CHECK(cmap.bindings.size() == 1);
  CHECK(cmap.unmatched_keys == std::set<std::string>{"Ghost"});
}

TEST_CASE("correlation dump has the documented shape") {
  const CorpusIndex index = index_of({{"A", "body a"}, {"Nobody", "body n"}});
  const FiltrationList flist = make_filtration({{"A", 0.5}, {"Ghost", 0.9}});
  const auto doc = nlohmann::json::parse(correlation_to_json(correlate(index, flist)));

  REQUIRE(doc.is_object());
  CHECK(doc.size() == 3);
  CHECK(doc["bindings"].is_object());
  CHECK(doc["unmatched_hashes"].is_array());
  CHECK(doc["unmatched_keys"].is_array());
  for (const auto& [hash, binding] : doc["bindings"].items()) {
    CHECK(is_hash_token(hash));
    CHECK(binding["object_key"].is_string());
    CHECK(binding["rank"].is_number_unsigned());
    CHECK(binding["score"].is_number());
  }
  for (const auto& h : doc["unmatched_hashes"]) CHECK(is_hash_token(h.get<std::string>()));
}

namespace {

struct Scenario {
  CorpusIndex index;
  FiltrationList flist;
  CorrelationMap cmap;
  std::vector<SemanticHit> hits;
};

// G bound at rank 1, R at rank 2, U unmatched.
Scenario small_scenario() {
  Scenario s;
  s.index = index_of({{"G", "gold body"}, {"R", "runner body"}, {"U", "unranked body"}});
  s.flist = make_filtration({{"G", 0.9}, {"R", 0.4}});
  s.cmap = correlate(s.index, s.flist);
  const auto hash_of = [&s](const std::string& key) {
    for (const auto& [hash, chunk] : s.index.chunks) {
      if (chunk.object_key == key) return hash;
    }
    throw std::logic_error("no chunk for " + key);
  };
  s.hits = {SemanticHit{hash_of("R"), 0.9}, SemanticHit{hash_of("G"), 0.8},
            SemanticHit{hash_of("U"), 0.7}};
  return s;
}

}  // namespace

TEST_CASE("pass_through with empty filtration keeps the input order") {
  Scenario s = small_scenario();
  EvaluatorPolicy policy{EvaluatorMode::kPassThrough, 0.5, std::nullopt,
                         MissingPolicy::kKeepSemantic};
  const auto out = evaluate(s.hits, correlate(s.index, FiltrationList{}), FiltrationList{}, policy);
  REQUIRE(out.size() == s.hits.size());
  for (size_t i = 0; i < out.size(); ++i) {
    CHECK(out[i].chunk_hash == s.hits[i].chunk_hash);
    CHECK(out[i].semantic == s.hits[i].similarity);
    CHECK(out[i].final_rank == i + 1);
  }
}

TEST_CASE("filter admits only chunks ranked within the cutoff") {
  Scenario s = small_scenario();
  EvaluatorPolicy policy{EvaluatorMode::kFilter, 0.5, 1, MissingPolicy::kDrop};
  const auto out = evaluate(s.hits, s.cmap, s.flist, policy);
  REQUIRE(out.size() == 1);
  CHECK(out[0].object_key == "G");  // R is rank 2, U unmatched+dropped
  CHECK(out[0].final_rank == 1);
}

TEST_CASE("filter keep policies retain unmatched hits") {
  Scenario s = small_scenario();

  EvaluatorPolicy keep_zero{EvaluatorMode::kFilter, 0.5, 1, MissingPolicy::kKeepZero};
  auto out = evaluate(s.hits, s.cmap, s.flist, keep_zero);
  REQUIRE(out.size() == 2);  // G (rank 1) and U (unmatched, kept)
  CHECK(out[0].object_key == "U");  // semantic order preserved among survivors
  CHECK(out[0].deterministic == 0.0);
  CHECK(out[1].object_key == "G");

  EvaluatorPolicy keep_sem{EvaluatorMode::kFilter, 0.5, 1, MissingPolicy::kKeepSemantic};
  out = evaluate(s.hits, s.cmap, s.flist, keep_sem);
  REQUIRE(out.size() == 2);
  CHECK(out[0].object_key == "U");
  CHECK(out[0].deterministic == doctest::Approx((0.7 + 1.0) / 2.0));
}

TEST_CASE("fuse orders by the documented convex combination") {
  Scenario s = small_scenario();
  EvaluatorPolicy policy{EvaluatorMode::kFuse, 0.5, std::nullopt, MissingPolicy::kDrop};
  const auto out = evaluate(s.hits, s.cmap, s.flist, policy);
  REQUIRE(out.size() == 2);  // U dropped

  // independent recomputation: scores {0.9, 0.4} minmax to {1.0, 0.0}
  const double fused_g = comprag::test::fused_oracle(0.8, 1.0, 0.5);
  const double fused_r = comprag::test::fused_oracle(0.9, 0.0, 0.5);
  REQUIRE(fused_g > fused_r);
  CHECK(out[0].object_key == "G");
  CHECK(out[0].fused == doctest::Approx(fused_g).epsilon(1e-12));
  CHECK(out[1].object_key == "R");
  CHECK(out[1].fused == doctest::Approx(fused_r).epsilon(1e-12));
  CHECK(out[0].final_rank == 1);
  CHECK(out[1].final_rank == 2);
}

TEST_CASE("fuse over five hits matches a brute-force recomputation") {
  const CorpusIndex index = index_of({{"A", "body a"},
                                      {"B", "body b"},
                                      {"C", "body c"},
                                      {"D", "body d"},
                                      {"E", "body e"}});
  const FiltrationList flist =
      make_filtration({{"A", 10.0}, {"B", 7.5}, {"C", 5.0}, {"D", 2.5}, {"E", 0.0}});
  const CorrelationMap cmap = correlate(index, flist);

  std::vector<SemanticHit> hits;
  std::map<std::string, double> sim_of_key{
      {"A", -0.2}, {"B", 0.95}, {"C", 0.4}, {"D", 0.85}, {"E", 0.1}};
  for (const auto& [hash, chunk] : index.chunks) {
    hits.push_back(SemanticHit{hash, sim_of_key.at(chunk.object_key)});
  }

  EvaluatorPolicy policy{EvaluatorMode::kFuse, 0.5, std::nullopt, MissingPolicy::kDrop};
  const auto out = evaluate(hits, cmap, flist, policy);
  REQUIRE(out.size() == 5);

  // oracle: recompute alpha*(sim+1)/2 + (1-alpha)*minmax(score) for all five
  std::vector<double> all_scores{10.0, 7.5, 5.0, 2.5, 0.0};
  std::vector<std::pair<double, std::string>> expected;  // (-fused, hash)
  for (const SemanticHit& hit : hits) {
    const double det =
        comprag::test::minmax_oracle(cmap.bindings.at(hit.chunk_hash).score, all_scores);
    expected.emplace_back(-comprag::test::fused_oracle(hit.similarity, det, 0.5), hit.chunk_hash);
  }
  std::sort(expected.begin(), expected.end());
  for (size_t i = 0; i < out.size(); ++i) {
    CHECK(out[i].chunk_hash == expected[i].second);
    CHECK(out[i].fused == doctest::Approx(-expected[i].first).epsilon(1e-12));
  }
}

TEST_CASE("single-entry and all-equal filtrations normalize to one") {
  const CorpusIndex index = index_of({{"A", "body a"}, {"B", "body b"}});
  EvaluatorPolicy policy{EvaluatorMode::kFuse, 0.0, std::nullopt, MissingPolicy::kDrop};

  const FiltrationList single = make_filtration({{"A", 3.7}});
  auto out = evaluate({SemanticHit{assign_hash("A", "body a"), 0.2}}, correlate(index, single),
                      single, policy);
  REQUIRE(out.size() == 1);
  CHECK(out[0].deterministic == 1.0);

  const FiltrationList equal = make_filtration({{"A", 2.0}, {"B", 2.0}});
  const CorrelationMap cmap = correlate(index, equal);
  std::vector<SemanticHit> hits;
  for (const auto& [hash, chunk] : index.chunks) hits.push_back(SemanticHit{hash, 0.5});
  out = evaluate(hits, cmap, equal, policy);
  REQUIRE(out.size() == 2);
  CHECK(out[0].deterministic == 1.0);
  CHECK(out[1].deterministic == 1.0);
}

TEST_CASE("invalid policies are rejected") {
  Scenario s = small_scenario();
  EvaluatorPolicy bad_alpha{EvaluatorMode::kFuse, 1.5, std::nullopt, MissingPolicy::kDrop};
  CHECK_THROWS_AS(evaluate(s.hits, s.cmap, s.flist, bad_alpha), PolicyInvalid);
  bad_alpha.alpha = -0.1;
  CHECK_THROWS_AS(evaluate(s.hits, s.cmap, s.flist, bad_alpha), PolicyInvalid);
  bad_alpha.alpha = std::nan("");
  CHECK_THROWS_AS(evaluate(s.hits, s.cmap, s.flist, bad_alpha), PolicyInvalid);
  EvaluatorPolicy bad_cutoff{EvaluatorMode::kFilter, 0.5, 0, MissingPolicy::kDrop};
  CHECK_THROWS_AS(evaluate(s.hits, s.cmap, s.flist, bad_cutoff), PolicyInvalid);
}

TEST_CASE("evaluate output is always a subset of the input") {
  std::mt19937 rng(301);
  Scenario s = small_scenario();
  for (int round = 0; round < 50; ++round) {
    EvaluatorPolicy policy;
    policy.mode = static_cast<EvaluatorMode>(rng() % 3);
    policy.alpha = double(rng() % 11) / 10.0;
    policy.cutoff_m = (rng() % 2) ? std::optional<std::size_t>(1 + rng() % 4) : std::nullopt;
    policy.missing_policy = static_cast<MissingPolicy>(rng() % 3);

    std::set<std::string> input_hashes;
    std::vector<SemanticHit> hits;
    for (const auto& hit : s.hits) {
      if (rng() % 3 == 0) continue;
      hits.push_back(hit);
      input_hashes.insert(hit.chunk_hash);
    }

    for (const auto& eh : evaluate(hits, s.cmap, s.flist, policy)) {
      CHECK(input_hashes.count(eh.chunk_hash) == 1);
    }
  }
}

TEST_CASE("alpha extremes reduce fusion to one signal") {
  Scenario s = small_scenario();

  // alpha = 1: ordering equals sort by (-similarity, hash)
  EvaluatorPolicy semantic_only{EvaluatorMode::kFuse, 1.0, std::nullopt,
                                MissingPolicy::kKeepSemantic};
  auto out = evaluate(s.hits, s.cmap, s.flist, semantic_only);
  auto expected = s.hits;
  std::sort(expected.begin(), expected.end(), [](const SemanticHit& a, const SemanticHit& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.chunk_hash < b.chunk_hash;
  });
  REQUIRE(out.size() == expected.size());
  for (size_t i = 0; i < out.size(); ++i) CHECK(out[i].chunk_hash == expected[i].chunk_hash);

  // alpha = 0: bound hits ordered by (-normalized score, hash)
  EvaluatorPolicy deterministic_only{EvaluatorMode::kFuse, 0.0, std::nullopt,
                                     MissingPolicy::kDrop};
  out = evaluate(s.hits, s.cmap, s.flist, deterministic_only);
  REQUIRE(out.size() == 2);
  CHECK(out[0].object_key == "G");  // score 0.9 -> 1.0
  CHECK(out[1].object_key == "R");  // score 0.4 -> 0.0
}

TEST_CASE("filter cutoff is monotone") {
  Scenario s = small_scenario();
  for (const auto missing :
       {MissingPolicy::kDrop, MissingPolicy::kKeepZero, MissingPolicy::kKeepSemantic}) {
    std::set<std::string> previous;
    for (std::size_t m = 1; m <= 3; ++m) {
      EvaluatorPolicy policy{EvaluatorMode::kFilter, 0.5, m, missing};
      std::set<std::string> survivors;
      for (const auto& eh : evaluate(s.hits, s.cmap, s.flist, policy)) {
        survivors.insert(eh.chunk_hash);
      }
      CHECK(std::includes(survivors.begin(), survivors.end(), previous.begin(), previous.end()));
      previous = survivors;
    }
  }
}
