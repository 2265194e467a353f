#include "comprag/canon.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

#include "unicode_tables.hpp"

namespace comprag::canon {
namespace {

using namespace tables;

// Hangul syllable composition is algorithmic (UAX #15 §3.12).
constexpr char32_t kHangulSBase = 0xAC00;
constexpr char32_t kHangulLBase = 0x1100;
constexpr char32_t kHangulVBase = 0x1161;
constexpr char32_t kHangulTBase = 0x11A7;
constexpr int kHangulLCount = 19;
constexpr int kHangulVCount = 21;
constexpr int kHangulTCount = 28;
constexpr int kHangulNCount = kHangulVCount * kHangulTCount;
constexpr int kHangulSCount = kHangulLCount * kHangulNCount;

uint8_t combining_class(char32_t cp) {
  auto it = std::lower_bound(kCcc, kCcc + kCccCount, cp,
                             [](const CccEntry& e, char32_t v) { return e.cp < v; });
  if (it != kCcc + kCccCount && it->cp == cp) return it->ccc;
  return 0;
}

const DecompEntry* find_decomp(char32_t cp) {
  auto it = std::lower_bound(kDecomp, kDecomp + kDecompCount, cp,
                             [](const DecompEntry& e, char32_t v) { return e.cp < v; });
  if (it != kDecomp + kDecompCount && it->cp == cp) return it;
  return nullptr;
}

bool compose_pair(char32_t lead, char32_t trail, char32_t* out) {
  // Hangul L+V and LV+T
  if (lead >= kHangulLBase && lead < kHangulLBase + kHangulLCount &&
      trail >= kHangulVBase && trail < kHangulVBase + kHangulVCount) {
    *out = kHangulSBase + ((lead - kHangulLBase) * kHangulVCount + (trail - kHangulVBase)) *
                              kHangulTCount;
    return true;
  }
  if (lead >= kHangulSBase && lead < kHangulSBase + kHangulSCount &&
      (lead - kHangulSBase) % kHangulTCount == 0 && trail > kHangulTBase &&
      trail < kHangulTBase + kHangulTCount) {
    *out = lead + (trail - kHangulTBase);
    return true;
  }
  const uint64_t key = (static_cast<uint64_t>(lead) << 24) | trail;
  auto it = std::lower_bound(kComp, kComp + kCompCount, key,
                             [](const CompEntry& e, uint64_t v) { return e.key < v; });
  if (it != kComp + kCompCount && it->key == key) {
    *out = it->composed;
    return true;
  }
  return false;
}

// Decodes UTF-8 into codepoints; returns false on any invalid sequence.
bool decode_utf8(std::string_view text, std::vector<char32_t>* out) {
  out->clear();
  out->reserve(text.size());
  const auto* p = reinterpret_cast<const unsigned char*>(text.data());
  size_t n = text.size();
  size_t i = 0;
  while (i < n) {
    unsigned char b0 = p[i];
    if (b0 < 0x80) {
      out->push_back(b0);
      i += 1;
      continue;
    }
    int len;
    char32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (int j = 1; j < len; ++j) {
      unsigned char b = p[i + j];
      if ((b & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (b & 0x3F);
    }
    // overlong / out-of-range / surrogate
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        cp > kMaxCodepoint || (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    out->push_back(cp);
    i += len;
  }
  return true;
}

void encode_utf8(const std::vector<char32_t>& cps, std::string* out) {
  out->clear();
  for (char32_t cp : cps) {
    if (cp < 0x80) {
      out->push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out->push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out->push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out->push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out->push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out->push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out->push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out->push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out->push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out->push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
}

void decompose(const std::vector<char32_t>& in, std::vector<char32_t>* out) {
  out->clear();
  out->reserve(in.size() + in.size() / 4);
  for (char32_t cp : in) {
    if (cp >= kHangulSBase && cp < kHangulSBase + kHangulSCount) {
      const int s = static_cast<int>(cp - kHangulSBase);
      out->push_back(kHangulLBase + s / kHangulNCount);
      out->push_back(kHangulVBase + (s % kHangulNCount) / kHangulTCount);
      if (s % kHangulTCount != 0) out->push_back(kHangulTBase + s % kHangulTCount);
      continue;
    }
    if (const DecompEntry* e = find_decomp(cp)) {
      for (uint8_t j = 0; j < e->len; ++j) out->push_back(kDecompPool[e->offset + j]);
    } else {
      out->push_back(cp);
    }
  }
}

// Canonical ordering: stable sort of nonzero-ccc runs.
void canonical_order(std::vector<char32_t>* buf) {
  const size_t n = buf->size();
  size_t i = 0;
  while (i < n) {
    if (combining_class((*buf)[i]) == 0) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < n && combining_class((*buf)[j]) != 0) ++j;
    std::stable_sort(buf->begin() + i, buf->begin() + j,
                     [](char32_t a, char32_t b) { return combining_class(a) < combining_class(b); });
    i = j;
  }
}

void compose(const std::vector<char32_t>& in, std::vector<char32_t>* out) {
  out->clear();
  out->reserve(in.size());
  ptrdiff_t last_starter = -1;
  for (char32_t cp : in) {
    const uint8_t cc = combining_class(cp);
    if (last_starter >= 0) {
      const bool adjacent = static_cast<size_t>(last_starter) + 1 == out->size();
      const uint8_t prev_cc = adjacent ? 0 : combining_class(out->back());
      const bool blocked = !adjacent && prev_cc >= cc;
      char32_t composed;
      if (!blocked && compose_pair((*out)[last_starter], cp, &composed)) {
        (*out)[last_starter] = composed;
        continue;
      }
    }
    out->push_back(cp);
    if (cc == 0) last_starter = static_cast<ptrdiff_t>(out->size()) - 1;
  }
}

bool is_whitespace(char32_t cp) {
  return std::binary_search(kWhitespace, kWhitespace + kWhitespaceCount, cp);
}

}  // namespace

std::string nfc(std::string_view text) {
  std::vector<char32_t> cps;
  if (!decode_utf8(text, &cps)) return std::string(text);
  std::vector<char32_t> decomposed;
  decompose(cps, &decomposed);
  canonical_order(&decomposed);
  std::vector<char32_t> composed;
  compose(decomposed, &composed);
  std::string out;
  encode_utf8(composed, &out);
  return out;
}

std::string casefold(std::string_view text) {
  std::vector<char32_t> cps;
  if (!decode_utf8(text, &cps)) return std::string(text);
  std::vector<char32_t> folded;
  folded.reserve(cps.size());
  for (char32_t cp : cps) {
    auto it = std::lower_bound(kFold, kFold + kFoldCount, cp,
                               [](const FoldEntry& e, char32_t v) { return e.cp < v; });
    if (it != kFold + kFoldCount && it->cp == cp) {
      for (uint8_t j = 0; j < it->len; ++j) folded.push_back(it->seq[j]);
    } else {
      folded.push_back(cp);
    }
  }
  std::string out;
  encode_utf8(folded, &out);
  return out;
}

std::string trim(std::string_view text) {
  std::vector<char32_t> cps;
  if (!decode_utf8(text, &cps)) return std::string(text);
  size_t begin = 0;
  size_t end = cps.size();
  while (begin < end && is_whitespace(cps[begin])) ++begin;
  while (end > begin && is_whitespace(cps[end - 1])) --end;
  std::vector<char32_t> kept(cps.begin() + begin, cps.begin() + end);
  std::string out;
  encode_utf8(kept, &out);
  return out;
}

std::string canonical_key(std::string_view key) {
  return trim(casefold(nfc(key)));
}

}  // namespace comprag::canon
