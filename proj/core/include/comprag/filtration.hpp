#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace comprag {

/// One row of the out-of-model ranking.
struct FiltrationEntry {
  std::string object_key;
  double score = 0.0;   // desirability index
  std::size_t rank = 0; // 1-based, consecutive
};

/// Sorted deterministic ranking: entries ordered by descending score, equal
/// scores by ascending object_key, ranks 1..N with no gaps, keys unique
/// (after canonicalization).
struct FiltrationList {
  std::vector<FiltrationEntry> entries;

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
};

/// Sorts, ranks and validates raw (key, score) pairs; input order is
/// irrelevant. Throws DuplicateKey, NonFiniteScore.
FiltrationList make_filtration(std::vector<std::pair<std::string, double>> scored);

/// File format: JSON {"entries": [{"object_key": string, "score": number}]}.
FiltrationList parse_filtration_json(std::string_view json_text);
FiltrationList ingest_filtration(const std::filesystem::path& path);
std::string filtration_to_json(const FiltrationList& flist);
void save_filtration(const FiltrationList& flist, const std::filesystem::path& path);

}  // namespace comprag
