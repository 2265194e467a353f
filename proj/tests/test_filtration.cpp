#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include <nlohmann/json.hpp>

#include "comprag/errors.hpp"
#include "comprag/filtration.hpp"
#include "support/oracles.hpp"

using namespace comprag;

TEST_CASE("two entries sort by descending score regardless of input order") {
  for (auto scored : {std::vector<std::pair<std::string, double>>{{"A", 0.9}, {"B", 0.5}},
                      std::vector<std::pair<std::string, double>>{{"B", 0.5}, {"A", 0.9}}}) {
    const FiltrationList flist = make_filtration(scored);
    REQUIRE(flist.size() == 2);
    CHECK(flist.entries[0].object_key == "A");
    CHECK(flist.entries[0].rank == 1);
    CHECK(flist.entries[1].object_key == "B");
    CHECK(flist.entries[1].rank == 2);
  }
}

TEST_CASE("equal scores break ties by ascending key") {
  const FiltrationList flist = make_filtration({{"B", 0.7}, {"A", 0.7}});
  REQUIRE(flist.size() == 2);
  CHECK(flist.entries[0].object_key == "A");
  CHECK(flist.entries[1].object_key == "B");
}

TEST_CASE("random lists match the oracle sort and keep ranks consecutive") {
  std::mt19937 rng(101);
  for (int round = 0; round < 30; ++round) {
    std::vector<std::pair<std::string, double>> scored;
    const size_t n = 1 + rng() % 100;
    for (size_t i = 0; i < n; ++i) {
      // coarse grid on purpose: plenty of score ties
      scored.emplace_back("key" + std::to_string(i), double(rng() % 10) / 10.0);
    }
    const auto expected = comprag::test::sort_scored_oracle(scored);
    const FiltrationList flist = make_filtration(scored);

    REQUIRE(flist.size() == n);
    for (size_t i = 0; i < n; ++i) {
      CHECK(flist.entries[i].object_key == expected[i].first);
      CHECK(flist.entries[i].score == expected[i].second);
      CHECK(flist.entries[i].rank == i + 1);  // 1..N, no gaps
    }
  }
}

TEST_CASE("duplicate keys are rejected, canonically") {
  CHECK_THROWS_AS(make_filtration({{"A", 0.1}, {"A", 0.2}}), DuplicateKey);
  // same key after NFC + case fold + trim
  CHECK_THROWS_AS(make_filtration({{"Gio's", 0.1}, {"  gio's ", 0.2}}), DuplicateKey);
  CHECK_THROWS_AS(make_filtration({{"café", 0.1}, {"café", 0.2}}), DuplicateKey);
}

TEST_CASE("non-finite scores are rejected") {
  CHECK_THROWS_AS(make_filtration({{"A", std::nan("")}}), NonFiniteScore);
  CHECK_THROWS_AS(make_filtration({{"A", INFINITY}}), NonFiniteScore);
}

TEST_CASE("an empty list is legal") {
  const FiltrationList flist = make_filtration({});
  CHECK(flist.empty());
  CHECK(parse_filtration_json(R"({"entries": []})").empty());
}

TEST_CASE("json round-trip preserves order and scores") {
  const FiltrationList flist =
      make_filtration({{"Gio's", 0.83}, {"Napoli Express", 0.79}, {"Sakura", 0.41}});
  const FiltrationList back = parse_filtration_json(filtration_to_json(flist));
  REQUIRE(back.size() == flist.size());
  for (size_t i = 0; i < flist.size(); ++i) {
    CHECK(back.entries[i].object_key == flist.entries[i].object_key);
    CHECK(back.entries[i].score == flist.entries[i].score);
    CHECK(back.entries[i].rank == flist.entries[i].rank);
  }
}

TEST_CASE("file ingestion validates structure") {
  CHECK_THROWS_AS(parse_filtration_json("not json"), Error);
  CHECK_THROWS_AS(parse_filtration_json(R"({"wrong": []})"), Error);
  CHECK_THROWS_AS(parse_filtration_json(R"({"entries": [{"object_key": 3, "score": 1}]})"), Error);
  CHECK_THROWS_AS(parse_filtration_json(R"({"entries": [{"object_key": "A"}]})"), Error);
  CHECK_THROWS_AS(ingest_filtration("/nonexistent/filtration.json"), Error);
}
