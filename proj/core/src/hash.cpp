#include "comprag/hash.hpp"

#include <array>
#include <cstring>

#include "comprag/canon.hpp"

namespace comprag {
namespace {

constexpr uint64_t kC1 = 0x87c37b91114253d5ULL;
constexpr uint64_t kC2 = 0x4cf5ad432745937fULL;

inline uint64_t rotl64(uint64_t x, int r) { return (x << r) | (x >> (64 - r)); }

inline uint64_t fmix64(uint64_t k) {
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdULL;
  k ^= k >> 33;
  k *= 0xc4ceb9fe1a85ec53ULL;
  k ^= k >> 33;
  return k;
}

inline uint64_t load_le64(const unsigned char* p) {
  return static_cast<uint64_t>(p[0]) | static_cast<uint64_t>(p[1]) << 8 |
         static_cast<uint64_t>(p[2]) << 16 | static_cast<uint64_t>(p[3]) << 24 |
         static_cast<uint64_t>(p[4]) << 32 | static_cast<uint64_t>(p[5]) << 40 |
         static_cast<uint64_t>(p[6]) << 48 | static_cast<uint64_t>(p[7]) << 56;
}

void append_le64(std::string* out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

Hash128 murmur3_x64_128(const void* data, std::size_t len, uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  const std::size_t nblocks = len / 16;

  uint64_t h1 = seed;
  uint64_t h2 = seed;

  for (std::size_t i = 0; i < nblocks; ++i) {
    uint64_t k1 = load_le64(p + i * 16);
    uint64_t k2 = load_le64(p + i * 16 + 8);

    k1 *= kC1;
    k1 = rotl64(k1, 31);
    k1 *= kC2;
    h1 ^= k1;

    h1 = rotl64(h1, 27);
    h1 += h2;
    h1 = h1 * 5 + 0x52dce729;

    k2 *= kC2;
    k2 = rotl64(k2, 33);
    k2 *= kC1;
    h2 ^= k2;

    h2 = rotl64(h2, 31);
    h2 += h1;
    h2 = h2 * 5 + 0x38495ab5;
  }

  const unsigned char* tail = p + nblocks * 16;
  const std::size_t t = len & 15;
  uint64_t k1 = 0;
  uint64_t k2 = 0;
  if (t > 8) {
    for (std::size_t i = t; i > 8; --i) {
      k2 ^= static_cast<uint64_t>(tail[i - 1]) << (8 * (i - 9));
    }
    k2 *= kC2;
    k2 = rotl64(k2, 33);
    k2 *= kC1;
    h2 ^= k2;
  }
  if (t > 0) {
    const std::size_t m = t < 8 ? t : 8;
    for (std::size_t i = m; i > 0; --i) {
      k1 ^= static_cast<uint64_t>(tail[i - 1]) << (8 * (i - 1));
    }
    k1 *= kC1;
    k1 = rotl64(k1, 31);
    k1 *= kC2;
    h1 ^= k1;
  }

  h1 ^= static_cast<uint64_t>(len);
  h2 ^= static_cast<uint64_t>(len);
  h1 += h2;
  h2 += h1;
  h1 = fmix64(h1);
  h2 = fmix64(h2);
  h1 += h2;
  h2 += h1;
  return Hash128{h1, h2};
}

std::string to_hex(const Hash128& h) {
  static const char kDigits[] = "0123456789abcdef";
  std::string out(kHashHexWidth, '0');
  for (int i = 0; i < 16; ++i) {
    out[15 - i] = kDigits[(h.h1 >> (4 * i)) & 0xf];
    out[31 - i] = kDigits[(h.h2 >> (4 * i)) & 0xf];
  }
  return out;
}

std::string assign_hash(std::string_view object_key, std::string_view body) {
  const std::string key_c = canon::nfc(object_key);
  const std::string body_c = canon::nfc(body);
  std::string message;
  message.reserve(key_c.size() + body_c.size() + 16);
  append_le64(&message, key_c.size());
  message += key_c;
  append_le64(&message, body_c.size());
  message += body_c;
  return to_hex(murmur3_x64_128(message.data(), message.size(), 0));
}

bool is_hash_token(std::string_view s) {
  if (s.size() != kHashHexWidth) return false;
  for (char c : s) {
    const bool hex = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    if (!hex) return false;
  }
  return true;
}

}  // namespace comprag
