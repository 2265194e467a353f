#!/usr/bin/env python3
"""Regenerates tests/fixtures/hash_cases.json: frozen murmur3 and assign_hash
vectors computed by the independent Python reference."""

import json
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))
from murmur3_reference import assign_hash, hash_hex

RAW_MESSAGES = [
    b"",
    b"a",
    b"ab",
    b"abc",
    b"hello, world",
    b"0123456789abcde",   # 15 bytes: full tail
    b"0123456789abcdef",  # 16 bytes: one block, no tail
    b"0123456789abcdefg",
    b"The quick brown fox jumps over the lazy dog",
    bytes(range(256)),
]

PAIRS = [
    ("Gio's", "name: Gio's\ncuisine: italian"),
    ("Rio's", "name: Gio's\ncuisine: italian"),
    ("Gio's", ""),
    ("café", "menu"),
    ("café", "menu"),          # decomposed key, same token as above
    ("k", "café"),
    ("k", "café"),
    ("a", "b" * 1000),
    ("가", "가"),      # Hangul syllable vs jamo pair
]


def main():
    root = Path(__file__).resolve().parent.parent
    rng = random.Random(87123)
    raw = [{"message_hex": m.hex(), "hash": hash_hex(m)} for m in RAW_MESSAGES]
    for _ in range(40):
        m = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 120)))
        raw.append({"message_hex": m.hex(), "hash": hash_hex(m)})
    pairs = [
        {"object_key": k, "body": b, "token": assign_hash(k, b)} for k, b in PAIRS
    ]
    out = {"murmur3_x64_128_seed0": raw, "assign_hash": pairs}
    path = root / "fixtures" / "hash_cases.json"
    path.write_text(json.dumps(out, ensure_ascii=True, indent=1) + "\n")
    print(f"hash cases: {len(raw)} raw + {len(pairs)} pairs -> {path}")


if __name__ == "__main__":
    main()
