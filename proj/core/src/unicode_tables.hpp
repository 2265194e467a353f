// Generated by tools/gen_unicode_tables.py from Python unicodedata
// (Unicode 13.0.0). Do not edit by hand.
#pragma once

#include <cstddef>
#include <cstdint>

namespace comprag::canon::tables {

inline constexpr char32_t kMaxCodepoint = 0x10FFFF;

struct DecompEntry {
  char32_t cp;
  uint32_t offset;  // into kDecompPool
  uint8_t len;
};

struct CccEntry {
  char32_t cp;
  uint8_t ccc;
};

struct CompEntry {
  uint64_t key;  // (starter << 24) | combining
  char32_t composed;
};

struct FoldEntry {
  char32_t cp;
  char32_t seq[3];
  uint8_t len;
};

extern const DecompEntry kDecomp[];
extern const size_t kDecompCount;
extern const char32_t kDecompPool[];
extern const CccEntry kCcc[];
extern const size_t kCccCount;
extern const CompEntry kComp[];
extern const size_t kCompCount;
extern const FoldEntry kFold[];
extern const size_t kFoldCount;
extern const char32_t kWhitespace[];
extern const size_t kWhitespaceCount;

}  // namespace comprag::canon::tables
