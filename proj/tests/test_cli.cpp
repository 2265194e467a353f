// Integration tests driving the installed CLI binary end to end.

#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "support/fixtures.hpp"

#ifndef COMPRAG_CLI_PATH
#error "COMPRAG_CLI_PATH must be defined by the build"
#endif

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args, const fs::path& cwd) {
  const std::string cmd = "cd \"" + cwd.string() +
                          "\" && env -u COMPRAG_EMBED_URL -u COMPRAG_GEN_URL \"" +
                          COMPRAG_CLI_PATH "\" " + args + " 2>&1";
  std::array<char, 4096> buffer{};
  RunResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  size_t n = 0;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
    result.output.append(buffer.data(), n);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

struct Workspace {
  Workspace() {
    dir = fs::temp_directory_path() / ("comprag_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }

  fs::path write(const std::string& name, const std::string& content) {
    const fs::path p = dir / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p;
  }

  fs::path dir;
};

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

const fs::path kRestaurants = comprag::test::fixture_path("restaurants.jsonl");
const fs::path kMetrics = comprag::test::fixture_path("restaurant_metrics.csv");

}  // namespace

TEST_CASE("ingest builds a deterministic index") {
  Workspace ws;
  const auto first = run_cli("ingest " + q(kRestaurants) + " --out a.idx", ws.dir);
  CAPTURE(first.output);
  CHECK(first.exit_code == 0);
  CHECK(first.output.find("chunks: 20") != std::string::npos);
  CHECK(first.output.find("violations: 0") != std::string::npos);

  const auto second = run_cli("ingest " + q(kRestaurants) + " --out b.idx", ws.dir);
  CHECK(second.exit_code == 0);
  CHECK(comprag::test::read_file(ws.dir / "a.idx") == comprag::test::read_file(ws.dir / "b.idx"));
}

TEST_CASE("ingest reports violations with exit 1 unless allowed") {
  Workspace ws;
  const std::string records =
      R"({"object_key": "", "properties": {"p": "x"}})"
      "\n"
      R"({"object_key": "A", "properties": {"p": "shared body"}})"
      "\n"
      R"({"object_key": "A", "properties": {"p": "shared body"}})"
      "\n";
  const auto path = ws.write("bad.jsonl", records);

  const auto strict = run_cli("ingest " + q(path) + " --out bad.idx", ws.dir);
  CHECK(strict.exit_code == 1);
  CHECK(strict.output.find("empty_object_key") != std::string::npos);
  CHECK(strict.output.find("duplicate_chunk") != std::string::npos);
  CHECK_FALSE(fs::exists(ws.dir / "bad.idx"));

  const auto allowed = run_cli("ingest " + q(path) + " --out ok.idx --allow-violations", ws.dir);
  CHECK(allowed.exit_code == 0);
  CHECK(allowed.output.find("kept: 1") != std::string::npos);
  CHECK(fs::exists(ws.dir / "ok.idx"));
}

TEST_CASE("ingest rejects malformed records with exit 2") {
  Workspace ws;
  const auto path = ws.write("broken.jsonl", "this is not json\n");
  const auto result = run_cli("ingest " + q(path), ws.dir);
  CHECK(result.exit_code == 2);
  CHECK(result.output.find("error:") != std::string::npos);

  const auto missing = run_cli("ingest nonexistent.jsonl", ws.dir);
  CHECK(missing.exit_code == 2);
}

TEST_CASE("score writes the filtration in oracle order") {
  Workspace ws;
  const auto result = run_cli("score " + q(kMetrics) + " --out flist.json", ws.dir);
  CAPTURE(result.output);
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("entries: 20") != std::string::npos);

  const json flist = json::parse(comprag::test::read_file(ws.dir / "flist.json"));
  const json golden =
      json::parse(comprag::test::read_file(comprag::test::fixture_path("golden_expected.json")));
  REQUIRE(flist["entries"].size() == golden["filtration_order"].size());
  for (size_t i = 0; i < flist["entries"].size(); ++i) {
    CHECK(flist["entries"][i]["object_key"] == golden["filtration_order"][i]);
  }
}

TEST_CASE("score with a single row ranks it first") {
  Workspace ws;
  const auto csv = ws.write("one.csv",
                            "object_key,nps,response_time_min,review_score,proximity_km\n"
                            "Solo,10,25,4.0,2.0\n");
  const auto result = run_cli("score " + q(csv) + " --out one.json", ws.dir);
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("entries: 1") != std::string::npos);
  const json flist = json::parse(comprag::test::read_file(ws.dir / "one.json"));
  REQUIRE(flist["entries"].size() == 1);
  CHECK(flist["entries"][0]["object_key"] == "Solo");
}

TEST_CASE("score names the missing column and exits 2") {
  Workspace ws;
  const auto csv = ws.write("short.csv", "object_key,nps,review_score,proximity_km\nA,1,2,3\n");
  const auto result = run_cli("score " + q(csv), ws.dir);
  CHECK(result.exit_code == 2);
  CHECK(result.output.find("response_time_min") != std::string::npos);
}

namespace {

// ingest + score once for the query tests
struct IndexedWorkspace : Workspace {
  IndexedWorkspace() {
    REQUIRE(run_cli("ingest " + q(kRestaurants) + " --out corpus.idx", dir).exit_code == 0);
    REQUIRE(run_cli("score " + q(kMetrics) + " --out flist.json", dir).exit_code == 0);
  }

  RunResult query(const std::string& args) {
    return run_cli("query --index corpus.idx --filtration flist.json " + args, dir);
  }
};

const std::string kGoldenQuery = "\"What are the best options for Italian food nearby?\"";

}  // namespace

TEST_CASE("query answers the golden question with the oracle winner") {
  IndexedWorkspace ws;
  const auto result = ws.query(kGoldenQuery + " --k 8 --mode fuse --alpha 0.5 --json");
  CAPTURE(result.output);
  REQUIRE(result.exit_code == 0);

  const json bundle = json::parse(result.output);  // strict parse
  const json golden =
      json::parse(comprag::test::read_file(comprag::test::fixture_path("golden_expected.json")));
  REQUIRE(!bundle["evidence"].empty());
  CHECK(bundle["evidence"][0]["object_key"] == golden["top"]["object_key"]);
  CHECK(bundle["evidence"][0]["chunk_hash"] == golden["top"]["chunk_hash"]);
  CHECK(bundle["answer_text"].get<std::string>().find(
            golden["top"]["object_key"].get<std::string>()) != std::string::npos);
}

TEST_CASE("query --mode pass_through preserves raw retrieval order") {
  IndexedWorkspace ws;
  const auto result = ws.query(kGoldenQuery + " --k 8 --mode pass_through --json");
  REQUIRE(result.exit_code == 0);
  const json bundle = json::parse(result.output);
  const json golden =
      json::parse(comprag::test::read_file(comprag::test::fixture_path("golden_expected.json")));
  REQUIRE(bundle["evidence"].size() == golden["retrieval"].size());
  for (size_t i = 0; i < bundle["evidence"].size(); ++i) {
    CHECK(bundle["evidence"][i]["chunk_hash"] == golden["retrieval"][i]["chunk_hash"]);
    CHECK(bundle["evidence"][i]["object_key"] == golden["retrieval"][i]["object_key"]);
  }
}

TEST_CASE("query --k caps the evidence rows") {
  IndexedWorkspace ws;
  const auto result = ws.query(kGoldenQuery + " --k 3 --json");
  REQUIRE(result.exit_code == 0);
  CHECK(json::parse(result.output)["evidence"].size() <= 3);
}

TEST_CASE("query flags override the config file") {
  IndexedWorkspace ws;
  ws.write("comprag.toml",
           "[evaluator]\nmode = \"fuse\"\nalpha = 0.9\n\n[paths]\nindex = \"corpus.idx\"\n"
           "filtration = \"flist.json\"\n");

  // flag --mode pass_through wins over config fuse
  const auto result = run_cli("query " + kGoldenQuery + " --k 8 --mode pass_through --json",
                              ws.dir);
  REQUIRE(result.exit_code == 0);
  const json bundle = json::parse(result.output);
  const json golden =
      json::parse(comprag::test::read_file(comprag::test::fixture_path("golden_expected.json")));
  CHECK(bundle["evidence"][0]["chunk_hash"] == golden["retrieval"][0]["chunk_hash"]);
}

TEST_CASE("query human output lists evidence and timings") {
  IndexedWorkspace ws;
  const auto result = ws.query(kGoldenQuery + " --k 5");
  REQUIRE(result.exit_code == 0);
  CHECK(result.output.find("recommended options") != std::string::npos);
  CHECK(result.output.find("timings ms:") != std::string::npos);
  CHECK(result.output.find("unmatched:") != std::string::npos);
}

TEST_CASE("query without files exits 2") {
  Workspace ws;
  const auto result = run_cli("query \"anything\"", ws.dir);
  CHECK(result.exit_code == 2);
  CHECK(result.output.find("not found") != std::string::npos);
}

TEST_CASE("query against an unreachable remote embedder exits 3") {
  IndexedWorkspace ws;
  ws.write("remote.toml",
           "[embedder]\nmode = \"remote\"\nremote_url = \"http://127.0.0.1:1/embed\"\n");
  const auto result = run_cli(
      "--config remote.toml query \"anything\" --index corpus.idx --filtration flist.json",
      ws.dir);
  CHECK(result.exit_code == 3);
}

TEST_CASE("inspect dumps a well-formed correlation map") {
  IndexedWorkspace ws;
  const auto result = run_cli("inspect --index corpus.idx --filtration flist.json", ws.dir);
  REQUIRE(result.exit_code == 0);
  const json dump = json::parse(result.output);
  REQUIRE(dump.is_object());
  CHECK(dump.contains("bindings"));
  CHECK(dump.contains("unmatched_hashes"));
  CHECK(dump.contains("unmatched_keys"));
  CHECK(dump["bindings"].size() == 20);  // every restaurant is ranked
  CHECK(dump["unmatched_hashes"].empty());
  CHECK(dump["unmatched_keys"].empty());
}

TEST_CASE("inspect --dump-index exports the corpus") {
  IndexedWorkspace ws;
  const auto result = run_cli("inspect --index corpus.idx --dump-index", ws.dir);
  REQUIRE(result.exit_code == 0);
  const json dump = json::parse(result.output);
  CHECK(dump["chunks"].size() == 20);
  CHECK(dump["dim"] == 256);
}

TEST_CASE("unknown config keys make every command exit 2") {
  IndexedWorkspace ws;
  ws.write("bad.toml", "[embedder]\nnot_a_key = 1\n");
  const auto result = run_cli("--config bad.toml score " + q(kMetrics), ws.dir);
  CHECK(result.exit_code == 2);
  CHECK(result.output.find("not_a_key") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  Workspace ws;
  CHECK(run_cli("frobnicate", ws.dir).exit_code == 2);
  CHECK(run_cli("ingest", ws.dir).exit_code == 2);   // missing positional
  CHECK(run_cli("", ws.dir).exit_code == 2);         // missing subcommand
  CHECK(run_cli("--help", ws.dir).exit_code == 0);
}
