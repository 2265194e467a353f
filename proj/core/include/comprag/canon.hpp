#pragma once

#include <string>
#include <string_view>

namespace comprag::canon {

/// Unicode canonical composition (NFC). Strings that are not valid UTF-8 are
/// returned unchanged.
std::string nfc(std::string_view text);

/// Full Unicode case folding (the locale-independent C+F mappings).
std::string casefold(std::string_view text);

/// Strips leading and trailing Unicode whitespace.
std::string trim(std::string_view text);

/// Key canonicalization used when correlating chunk-objects with external
/// rankings: NFC, then case fold, then trim. Exact match only — no fuzzy
/// resolution.
std::string canonical_key(std::string_view key);

}  // namespace comprag::canon
