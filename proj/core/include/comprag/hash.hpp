#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace comprag {

/// Width of a chunk hash token: 128 bits as lowercase hex.
inline constexpr std::size_t kHashHexWidth = 32;

struct Hash128 {
  uint64_t h1 = 0;
  uint64_t h2 = 0;

  bool operator==(const Hash128&) const = default;
};

/// MurmurHash3 x64/128 (Austin Appleby, public domain). Endian-stable: block
/// loads are explicit little-endian, so the digest is identical on any host.
Hash128 murmur3_x64_128(const void* data, std::size_t len, uint64_t seed = 0);

std::string to_hex(const Hash128& h);

/// Content hash token for a chunk-object. The (object_key, body) pair is NFC
/// canonicalized and length-prefixed before hashing, so the token depends
/// only on canonical content, never on byte-level encoding variants.
std::string assign_hash(std::string_view object_key, std::string_view body);

/// True iff `s` looks like a hash token: exactly 32 lowercase hex chars.
bool is_hash_token(std::string_view s);

}  // namespace comprag
