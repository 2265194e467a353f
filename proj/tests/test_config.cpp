#include <doctest.h>

#include "comprag/config.hpp"
#include "comprag/errors.hpp"

using namespace comprag;

TEST_CASE("defaults stand without a config file") {
  const PipelineConfig cfg = parse_config("");
  CHECK(cfg.embedder.dim == 256);
  CHECK(cfg.embedder.mode == "local");
  CHECK(cfg.chunking.target_size == 64);
  CHECK(cfg.chunking.tolerance == 0.1);
  CHECK(cfg.evaluator.mode == EvaluatorMode::kFuse);
  CHECK(cfg.evaluator.alpha == 0.5);
  CHECK(!cfg.evaluator.cutoff_m.has_value());
  CHECK(cfg.evaluator.missing_policy == MissingPolicy::kKeepSemantic);
  CHECK(cfg.query_k == 8);
  CHECK(cfg.weights.w_nps == 0.25);
  CHECK(cfg.paths.index_file == "comprag.idx");
  CHECK(cfg.paths.filtration_file == "filtration.json");
  CHECK(cfg.generator.mode == "template");
}

TEST_CASE("a full config file parses") {
  const char* toml = R"(
# comparative pipeline settings
[embedder]
dim = 128
mode = "remote"
remote_url = "http://embedder.internal:9000/embed"

[chunking]
target_size = 48
tolerance = 0.2        # generous packing
strategy = "rule_based"

[evaluator]
mode = "filter"
alpha = 0.7
cutoff_m = 5
missing_policy = "drop"

[query]
k = 12

[recommender]
w_nps = 0.4
w_time = 0.3
w_review = 0.2
w_prox = 0.1
nps_min = -50
nps_max = 50

[generator]
mode = "remote"
remote_url = "http://gen.internal:9100/generate"

[paths]
index = "data/corpus.idx"
filtration = "data/ranking.json"
)";
  const PipelineConfig cfg = parse_config(toml);
  CHECK(cfg.embedder.dim == 128);
  CHECK(cfg.embedder.mode == "remote");
  CHECK(cfg.embedder.remote_url == "http://embedder.internal:9000/embed");
  CHECK(cfg.chunking.target_size == 48);
  CHECK(cfg.chunking.tolerance == 0.2);
  CHECK(cfg.evaluator.mode == EvaluatorMode::kFilter);
  CHECK(cfg.evaluator.alpha == 0.7);
  REQUIRE(cfg.evaluator.cutoff_m.has_value());
  CHECK(*cfg.evaluator.cutoff_m == 5);
  CHECK(cfg.evaluator.missing_policy == MissingPolicy::kDrop);
  CHECK(cfg.query_k == 12);
  CHECK(cfg.weights.w_nps == 0.4);
  CHECK(cfg.bounds.nps.min == -50);
  CHECK(cfg.bounds.nps.max == 50);
  CHECK(cfg.generator.mode == "remote");
  CHECK(cfg.paths.index_file == std::filesystem::path("data/corpus.idx"));
  CHECK(cfg.paths.filtration_file == std::filesystem::path("data/ranking.json"));
}

TEST_CASE("unknown keys are rejected with their location") {
  try {
    parse_config("[embedder]\ndim = 64\ntypo_key = 3\n", "test.toml");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("typo_key") != std::string::npos);
    CHECK(what.find("test.toml:3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("[nosuchsection]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("freestanding = 1\n"), ConfigError);
}

TEST_CASE("malformed lines are rejected") {
  CHECK_THROWS_AS(parse_config("[embedder\ndim = 64\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[embedder]\ndim\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[embedder]\ndim = \n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[embedder]\ndim = \"unterminated\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[embedder]\ndim = 64\ndim = 65\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[embedder]\nmode = remote\n"), ConfigError);  // unquoted string
  CHECK_THROWS_AS(parse_config("[embedder]\ndim = \"64\"\n"), ConfigError);   // quoted number
}

TEST_CASE("cross-field validation catches bad values") {
  CHECK_THROWS_AS(parse_config("[embedder]\ndim = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[chunking]\ntolerance = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[evaluator]\nalpha = 2.0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[evaluator]\nmode = \"other\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[query]\nk = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[recommender]\nw_nps = 0.9\n"), ConfigError);  // sum != 1
  CHECK_THROWS_AS(parse_config("[recommender]\nnps_min = 200\n"), ConfigError);
}

TEST_CASE("cutoff zero means unlimited") {
  const PipelineConfig cfg = parse_config("[evaluator]\ncutoff_m = 0\n");
  CHECK(!cfg.evaluator.cutoff_m.has_value());
}

TEST_CASE("comments and blank lines are ignored") {
  const PipelineConfig cfg = parse_config(
      "# leading comment\n"
      "\n"
      "[embedder]\n"
      "dim = 32   # trailing comment\n"
      "mode = \"local\"  # another\n");
  CHECK(cfg.embedder.dim == 32);
  CHECK(cfg.embedder.mode == "local");
}

TEST_CASE("missing config file is an error") {
  CHECK_THROWS_AS(load_config("/nonexistent/comprag.toml"), ConfigError);
}
