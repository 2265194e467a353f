#include <doctest.h>

#include <random>

#include "comprag/errors.hpp"
#include "comprag/recommender.hpp"
#include "support/oracles.hpp"

using namespace comprag;

namespace {

MetricRecord record(const std::string& key, double nps, double time_min, double review,
                    double prox) {
  return MetricRecord{key, nps, time_min, review, prox};
}

}  // namespace

TEST_CASE("best bounds score 1, worst bounds score 0") {
  MetricWeights w;
  MetricBounds b;
  CHECK(desirability(record("best", 100, 10, 5, 0), w, b) == doctest::Approx(1.0));
  CHECK(desirability(record("worst", -100, 60, 0, 10), w, b) == doctest::Approx(0.0));
}

TEST_CASE("worked example: uniform weights") {
  MetricWeights w;
  MetricBounds b;
  // nps 50 of [-100,100] -> 0.75; time 20 of [10,60] -> 1-0.2 = 0.8;
  // review 4 of [0,5] -> 0.8; prox 2 of [0,10] -> 1-0.2 = 0.8
  const double score = desirability(record("x", 50, 20, 4, 2), w, b);
  CHECK(score == doctest::Approx(0.7875).epsilon(1e-12));
  CHECK(score ==
        doctest::Approx(comprag::test::desirability_oracle(50, 20, 4, 2, .25, .25, .25, .25)));
}

TEST_CASE("values outside the bounds clamp to the edge") {
  MetricWeights w{1.0, 0.0, 0.0, 0.0};
  MetricBounds narrow;
  narrow.nps = {0.0, 10.0};
  CHECK(desirability(record("above", 50, 30, 3, 5), w, narrow) == doctest::Approx(1.0));
  CHECK(desirability(record("at_edge", 10, 30, 3, 5), w, narrow) == doctest::Approx(1.0));
  CHECK(desirability(record("below", -50, 30, 3, 5), w, narrow) == doctest::Approx(0.0));
}

TEST_CASE("desirability stays within [0, 1] for random in-range inputs") {
  std::mt19937 rng(404);
  MetricWeights w;
  MetricBounds b;
  for (int i = 0; i < 500; ++i) {
    const double nps = -100.0 + double(rng() % 2001) / 10.0;
    const double t = 1.0 + double(rng() % 900) / 10.0;
    const double review = double(rng() % 51) / 10.0;
    const double prox = double(rng() % 200) / 10.0;
    const double score = desirability(record("r", nps, t, review, prox), w, b);
    CHECK(score >= 0.0);
    CHECK(score <= 1.0);
    CHECK(score == doctest::Approx(
                       comprag::test::desirability_oracle(nps, t, review, prox, .25, .25, .25, .25))
                       .epsilon(1e-12));
  }
}

TEST_CASE("monotonicity: benefit metrics up, cost metrics down") {
  std::mt19937 rng(405);
  MetricWeights w;
  MetricBounds b;
  for (int i = 0; i < 200; ++i) {
    const double nps = -90.0 + double(rng() % 1800) / 10.0;
    const double t = 11.0 + double(rng() % 480) / 10.0;
    const double review = double(rng() % 49) / 10.0;
    const double prox = double(rng() % 95) / 10.0;
    const MetricRecord base = record("r", nps, t, review, prox);
    const double score = desirability(base, w, b);

    CHECK(desirability(record("r", nps + 1, t, review, prox), w, b) >= score);
    CHECK(desirability(record("r", nps, t, review + 0.1, prox), w, b) >= score);
    CHECK(desirability(record("r", nps, t + 1, review, prox), w, b) <= score);
    CHECK(desirability(record("r", nps, t, review, prox + 0.5), w, b) <= score);
  }
}

TEST_CASE("invalid weights and bounds are rejected") {
  MetricBounds b;
  CHECK_THROWS_AS(desirability(record("r", 0, 30, 3, 5), MetricWeights{0.5, 0.5, 0.5, 0.5}, b),
                  std::invalid_argument);
  CHECK_THROWS_AS(desirability(record("r", 0, 30, 3, 5), MetricWeights{-0.5, 0.5, 0.5, 0.5}, b),
                  std::invalid_argument);
  MetricBounds bad;
  bad.review_score = {5.0, 5.0};
  CHECK_THROWS_AS(desirability(record("r", 0, 30, 3, 5), MetricWeights{}, bad), InvalidBounds);
  bad.review_score = {5.0, 2.0};
  CHECK_THROWS_AS(desirability(record("r", 0, 30, 3, 5), MetricWeights{}, bad), InvalidBounds);
}

TEST_CASE("single record ranks first regardless of score") {
  const FiltrationList flist =
      build_filtration({record("only", -80, 55, 0.5, 9)}, MetricWeights{}, MetricBounds{});
  REQUIRE(flist.size() == 1);
  CHECK(flist.entries[0].rank == 1);
  CHECK(flist.entries[0].object_key == "only");
}

TEST_CASE("a strictly dominating record ranks first") {
  const FiltrationList flist = build_filtration(
      {record("weaker", 10, 40, 3.0, 6), record("dominant", 60, 20, 4.5, 1)}, MetricWeights{},
      MetricBounds{});
  REQUIRE(flist.size() == 2);
  CHECK(flist.entries[0].object_key == "dominant");
  CHECK(flist.entries[1].object_key == "weaker");
}

TEST_CASE("random records match an independent score-then-sort oracle") {
  std::mt19937 rng(406);
  for (int round = 0; round < 10; ++round) {
    std::vector<MetricRecord> records;
    for (int i = 0; i < 20; ++i) {
      records.push_back(record("obj" + std::to_string(i), -100.0 + double(rng() % 2001) / 10.0,
                               10.0 + double(rng() % 500) / 10.0, double(rng() % 51) / 10.0,
                               double(rng() % 100) / 10.0));
    }
    std::vector<std::pair<std::string, double>> oracle_scored;
    for (const MetricRecord& r : records) {
      oracle_scored.emplace_back(
          r.object_key, comprag::test::desirability_oracle(r.nps, r.response_time_min,
                                                           r.review_score, r.proximity_km, .25,
                                                           .25, .25, .25));
    }
    const auto expected = comprag::test::sort_scored_oracle(oracle_scored);

    const FiltrationList flist = build_filtration(records, MetricWeights{}, MetricBounds{});
    REQUIRE(flist.size() == records.size());
    for (size_t i = 0; i < flist.size(); ++i) {
      CHECK(flist.entries[i].object_key == expected[i].first);
      CHECK(flist.entries[i].score == doctest::Approx(expected[i].second).epsilon(1e-12));
      CHECK(flist.entries[i].rank == i + 1);
    }
  }
}

TEST_CASE("weight degeneracy: one metric decides the ranking") {
  std::mt19937 rng(407);
  std::vector<MetricRecord> records;
  for (int i = 0; i < 15; ++i) {
    records.push_back(record("obj" + std::to_string(i), double(int(rng() % 200)) - 100.0,
                             10.0 + double(rng() % 50), double(rng() % 6), double(rng() % 10)));
  }
  const FiltrationList by_review =
      build_filtration(records, MetricWeights{0.0, 0.0, 1.0, 0.0}, MetricBounds{});

  std::vector<std::pair<std::string, double>> reviews;
  for (const MetricRecord& r : records) reviews.emplace_back(r.object_key, r.review_score / 5.0);
  const auto expected = comprag::test::sort_scored_oracle(reviews);
  for (size_t i = 0; i < expected.size(); ++i) {
    CHECK(by_review.entries[i].object_key == expected[i].first);
  }
}

TEST_CASE("duplicate object keys are rejected") {
  CHECK_THROWS_AS(build_filtration({record("A", 0, 30, 3, 5), record("A", 10, 20, 4, 2)},
                                   MetricWeights{}, MetricBounds{}),
                  DuplicateKey);
}

TEST_CASE("metrics csv parses the documented header") {
  const std::string csv =
      "object_key,nps,response_time_min,review_score,proximity_km\n"
      "Gio's,62,22,4.6,1.2\n"
      "\"Napoli, Express\",40,35,4.0,3.5\n";
  const auto records = parse_metrics_csv(csv);
  REQUIRE(records.size() == 2);
  CHECK(records[0].object_key == "Gio's");
  CHECK(records[0].nps == 62);
  CHECK(records[0].response_time_min == 22);
  CHECK(records[0].review_score == 4.6);
  CHECK(records[0].proximity_km == 1.2);
  CHECK(records[1].object_key == "Napoli, Express");  // quoted comma
}

TEST_CASE("metrics csv accepts any column order") {
  const std::string csv =
      "review_score,object_key,proximity_km,nps,response_time_min\n"
      "4.6,Gio's,1.2,62,22\n";
  const auto records = parse_metrics_csv(csv);
  REQUIRE(records.size() == 1);
  CHECK(records[0].object_key == "Gio's");
  CHECK(records[0].review_score == 4.6);
}

TEST_CASE("metrics csv names the missing column") {
  const std::string csv = "object_key,nps,review_score,proximity_km\nA,1,2,3\n";
  try {
    parse_metrics_csv(csv);
    FAIL("expected MalformedRecord");
  } catch (const MalformedRecord& e) {
    CHECK(std::string(e.what()).find("response_time_min") != std::string::npos);
  }
}

TEST_CASE("metrics csv rejects bad rows") {
  const std::string header = "object_key,nps,response_time_min,review_score,proximity_km\n";
  CHECK_THROWS_AS(parse_metrics_csv(header + "A,not_a_number,20,4,1\n"), MalformedRecord);
  CHECK_THROWS_AS(parse_metrics_csv(header + "A,500,20,4,1\n"), MalformedRecord);   // nps range
  CHECK_THROWS_AS(parse_metrics_csv(header + "A,10,0,4,1\n"), MalformedRecord);     // time > 0
  CHECK_THROWS_AS(parse_metrics_csv(header + "A,10,20,9,1\n"), MalformedRecord);    // review range
  CHECK_THROWS_AS(parse_metrics_csv(header + "A,10,20,4,-1\n"), MalformedRecord);   // prox >= 0
  CHECK_THROWS_AS(parse_metrics_csv(header + "A,10,20,4\n"), MalformedRecord);      // field count
  CHECK_THROWS_AS(parse_metrics_csv(header + ",10,20,4,1\n"), MalformedRecord);     // empty key
  CHECK_THROWS_AS(parse_metrics_csv(""), MalformedRecord);
}
