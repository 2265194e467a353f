#include "comprag/filtration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "comprag/canon.hpp"
#include "comprag/errors.hpp"

namespace comprag {

FiltrationList make_filtration(std::vector<std::pair<std::string, double>> scored) {
  std::map<std::string, std::string> seen;  // canonical -> original
  for (const auto& [key, score] : scored) {
    if (!std::isfinite(score)) {
      throw NonFiniteScore("filtration score for '" + key + "' is not finite");
    }
    const std::string canonical = canon::canonical_key(key);
    auto [it, inserted] = seen.emplace(canonical, key);
    if (!inserted) {
      throw DuplicateKey("filtration keys '" + it->second + "' and '" + key +
                         "' collide (canonical form '" + canonical + "')");
    }
  }

  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  FiltrationList flist;
  flist.entries.reserve(scored.size());
  std::size_t rank = 1;
  for (auto& [key, score] : scored) {
    flist.entries.push_back(FiltrationEntry{std::move(key), score, rank++});
  }
  return flist;
}

FiltrationList parse_filtration_json(std::string_view json_text) {
  const auto doc = nlohmann::json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("entries") ||
      !doc["entries"].is_array()) {
    throw Error("filtration file must be a JSON object with an \"entries\" array");
  }
  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(doc["entries"].size());
  for (const auto& entry : doc["entries"]) {
    if (!entry.is_object() || !entry.contains("object_key") || !entry["object_key"].is_string() ||
        !entry.contains("score") || !entry["score"].is_number()) {
      throw Error("filtration entry must be {\"object_key\": string, \"score\": number}");
    }
    scored.emplace_back(entry["object_key"].get<std::string>(), entry["score"].get<double>());
  }
  return make_filtration(std::move(scored));
}

FiltrationList ingest_filtration(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open filtration file: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_filtration_json(text);
}

std::string filtration_to_json(const FiltrationList& flist) {
  nlohmann::json entries = nlohmann::json::array();
  for (const FiltrationEntry& entry : flist.entries) {
    entries.push_back({{"object_key", entry.object_key}, {"score", entry.score}});
  }
  return nlohmann::json{{"entries", std::move(entries)}}.dump(1);
}

void save_filtration(const FiltrationList& flist, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open filtration file for writing: " + path.string());
  out << filtration_to_json(flist) << "\n";
  if (!out) throw Error("failed to write filtration file: " + path.string());
}

}  // namespace comprag
