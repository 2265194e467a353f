#include <doctest.h>

#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "comprag/hash.hpp"
#include "support/fixtures.hpp"

using namespace comprag;

namespace {

std::string hex_to_bytes(const std::string& hex) {
  std::string out;
  for (size_t i = 0; i + 1 < hex.size() || (hex.size() % 2 == 0 && i < hex.size()); i += 2) {
    out.push_back(static_cast<char>(std::stoi(hex.substr(i, 2), nullptr, 16)));
  }
  return out;
}

}  // namespace

TEST_CASE("murmur3 x64/128 matches the independent reference") {
  const auto cases = nlohmann::json::parse(test::read_file(test::fixture_path("hash_cases.json")));
  for (const auto& row : cases["murmur3_x64_128_seed0"]) {
    const std::string message = hex_to_bytes(row["message_hex"].get<std::string>());
    CAPTURE(row["message_hex"].get<std::string>());
    CHECK(to_hex(murmur3_x64_128(message.data(), message.size(), 0)) ==
          row["hash"].get<std::string>());
  }
}

TEST_CASE("assign_hash matches the independent reference") {
  const auto cases = nlohmann::json::parse(test::read_file(test::fixture_path("hash_cases.json")));
  for (const auto& row : cases["assign_hash"]) {
    const std::string key = row["object_key"].get<std::string>();
    const std::string body = row["body"].get<std::string>();
    CAPTURE(key);
    CHECK(assign_hash(key, body) == row["token"].get<std::string>());
  }
}

TEST_CASE("assign_hash is deterministic and content-addressed") {
  const std::string a = assign_hash("Gio's", "cuisine: italian");
  CHECK(a == assign_hash("Gio's", "cuisine: italian"));
  CHECK(a != assign_hash("Rio's", "cuisine: italian"));
  CHECK(a != assign_hash("Gio's", "cuisine: french"));
  CHECK(is_hash_token(a));
  CHECK(a.size() == kHashHexWidth);
}

TEST_CASE("assign_hash canonicalizes unicode before hashing") {
  CHECK(assign_hash("café", "menu") == assign_hash("café", "menu"));
  CHECK(assign_hash("k", "café") == assign_hash("k", "café"));
}

TEST_CASE("length prefixing separates key and body") {
  CHECK(assign_hash("ab", "c") != assign_hash("a", "bc"));
  CHECK(assign_hash("", "abc") != assign_hash("abc", ""));
}

TEST_CASE("no collisions over ten thousand random pairs") {
  std::mt19937_64 rng(42);
  std::set<std::string> seen;
  std::set<std::pair<std::string, std::string>> inputs;
  auto random_word = [&rng]() {
    std::string w;
    const size_t n = 1 + rng() % 20;
    for (size_t i = 0; i < n; ++i) w.push_back('a' + rng() % 26);
    return w;
  };
  for (int i = 0; i < 10000; ++i) {
    std::string key = random_word();
    std::string body = random_word() + " " + random_word();
    if (!inputs.insert({key, body}).second) continue;
    CHECK(seen.insert(assign_hash(key, body)).second);
  }
}

TEST_CASE("is_hash_token rejects near misses") {
  CHECK_FALSE(is_hash_token(""));
  CHECK_FALSE(is_hash_token("0123456789abcdef"));                    // too short
  CHECK_FALSE(is_hash_token(std::string(33, 'a')));                  // too long
  CHECK_FALSE(is_hash_token("0123456789ABCDEF0123456789ABCDEF"));    // uppercase
  CHECK_FALSE(is_hash_token("0123456789abcdeg0123456789abcdef"));    // non-hex
  CHECK(is_hash_token("0123456789abcdef0123456789abcdef"));
}
