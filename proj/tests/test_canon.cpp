#include <doctest.h>

#include <nlohmann/json.hpp>

#include "comprag/canon.hpp"
#include "support/fixtures.hpp"

using namespace comprag;

TEST_CASE("nfc composes decomposed sequences") {
  CHECK(canon::nfc("café") == "café");
  CHECK(canon::nfc("café") == "café");
  CHECK(canon::nfc("plain") == "plain");
}

TEST_CASE("nfc is idempotent on the frozen corpus") {
  const auto cases = nlohmann::json::parse(test::read_file(test::fixture_path("canon_cases.json")));
  for (const auto& row : cases) {
    const std::string nfc = canon::nfc(row["input"].get<std::string>());
    CHECK(canon::nfc(nfc) == nfc);
  }
}

TEST_CASE("canonicalizer matches the reference on frozen vectors") {
  const auto cases = nlohmann::json::parse(test::read_file(test::fixture_path("canon_cases.json")));
  REQUIRE(cases.size() > 300);
  for (const auto& row : cases) {
    const std::string input = row["input"].get<std::string>();
    CAPTURE(input);
    CHECK(canon::nfc(input) == row["nfc"].get<std::string>());
    CHECK(canon::casefold(input) == row["casefold"].get<std::string>());
    CHECK(canon::canonical_key(input) == row["canonical_key"].get<std::string>());
  }
}

TEST_CASE("canonical_key folds case and trims") {
  CHECK(canon::canonical_key("  gio's ") == "gio's");
  CHECK(canon::canonical_key("GIO'S") == "gio's");
  CHECK(canon::canonical_key("Gio's") == canon::canonical_key("  gio's "));
}

TEST_CASE("invalid utf-8 passes through unchanged") {
  const std::string garbage = "ab\xff\xfe cd";
  CHECK(canon::nfc(garbage) == garbage);
  CHECK(canon::casefold(garbage) == garbage);
  CHECK(canon::trim(garbage) == garbage);
}
