#!/usr/bin/env python3
"""Regenerates core/src/unicode_tables.{hpp,cpp} and tests/fixtures/canon_cases.json.

The C++ canonicalizer (NFC, case folding, whitespace trim) is table-driven;
the tables are extracted from Python's unicodedata so the test fixtures and
the shipped tables always come from the same Unicode version.

Usage: python3 tools/gen_unicode_tables.py [repo_root]
"""

import json
import random
import sys
import unicodedata
from pathlib import Path

MAX_CP = 0x110000
HANGUL_S_BASE, HANGUL_S_COUNT = 0xAC00, 11172


def is_surrogate(cp: int) -> bool:
    return 0xD800 <= cp <= 0xDFFF


def build_decompositions():
    """Full canonical (NFD) expansion per codepoint, Hangul excluded."""
    pool = []
    entries = []
    for cp in range(MAX_CP):
        if is_surrogate(cp):
            continue
        if HANGUL_S_BASE <= cp < HANGUL_S_BASE + HANGUL_S_COUNT:
            continue  # algorithmic in C++
        ch = chr(cp)
        nfd = unicodedata.normalize("NFD", ch)
        if nfd == ch:
            continue
        cps = [ord(c) for c in nfd]
        assert 1 <= len(cps) <= 4, (cp, cps)
        entries.append((cp, len(pool), len(cps)))
        pool.extend(cps)
    return entries, pool


def build_ccc():
    return [
        (cp, unicodedata.combining(chr(cp)))
        for cp in range(MAX_CP)
        if not is_surrogate(cp) and unicodedata.combining(chr(cp)) != 0
    ]


def build_compositions():
    """Primary composite pairs: one-level canonical decompositions that recompose."""
    pairs = []
    for cp in range(MAX_CP):
        if is_surrogate(cp):
            continue
        if HANGUL_S_BASE <= cp < HANGUL_S_BASE + HANGUL_S_COUNT:
            continue
        ch = chr(cp)
        raw = unicodedata.decomposition(ch)
        if not raw or raw.startswith("<"):
            continue
        parts = [int(p, 16) for p in raw.split()]
        if len(parts) != 2:
            continue  # singleton decompositions never recompose
        lead, trail = parts
        if unicodedata.combining(chr(lead)) != 0:
            continue  # non-starter decomposition, excluded
        # Empirical exclusion check: does NFC actually put the pair back together?
        if unicodedata.normalize("NFC", unicodedata.normalize("NFD", ch)) != ch:
            continue
        pairs.append((lead, trail, cp))
    return pairs


def build_casefold():
    entries = []
    for cp in range(MAX_CP):
        if is_surrogate(cp):
            continue
        ch = chr(cp)
        folded = ch.casefold()
        if folded == ch:
            continue
        cps = [ord(c) for c in folded]
        assert 1 <= len(cps) <= 3, (cp, cps)
        entries.append((cp, cps))
    return entries


def build_whitespace():
    return [cp for cp in range(MAX_CP) if not is_surrogate(cp) and chr(cp).isspace()]


def fmt_u32_list(values, per_line=12):
    lines = []
    for i in range(0, len(values), per_line):
        lines.append("    " + ", ".join(f"0x{v:X}" for v in values[i : i + per_line]) + ",")
    return "\n".join(lines)


def write_tables(root: Path):
    decomp_entries, decomp_pool = build_decompositions()
    ccc_entries = build_ccc()
    comp_pairs = build_compositions()
    fold_entries = build_casefold()
    ws = build_whitespace()

    hpp = f"""// Generated by tools/gen_unicode_tables.py from Python unicodedata
// (Unicode {unicodedata.unidata_version}). Do not edit by hand.
#pragma once

#include <cstddef>
#include <cstdint>

namespace comprag::canon::tables {{

inline constexpr char32_t kMaxCodepoint = 0x10FFFF;

struct DecompEntry {{
  char32_t cp;
  uint32_t offset;  // into kDecompPool
  uint8_t len;
}};

struct CccEntry {{
  char32_t cp;
  uint8_t ccc;
}};

struct CompEntry {{
  uint64_t key;  // (starter << 24) | combining
  char32_t composed;
}};

struct FoldEntry {{
  char32_t cp;
  char32_t seq[3];
  uint8_t len;
}};

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

}}  // namespace comprag::canon::tables
"""

    out = []
    out.append(
        f"""// Generated by tools/gen_unicode_tables.py from Python unicodedata
// (Unicode {unicodedata.unidata_version}). Do not edit by hand.
#include "unicode_tables.hpp"

namespace comprag::canon::tables {{
"""
    )

    out.append("const DecompEntry kDecomp[] = {")
    for cp, off, ln in decomp_entries:
        out.append(f"    {{0x{cp:X}, {off}, {ln}}},")
    out.append("};")
    out.append(f"const size_t kDecompCount = {len(decomp_entries)};")
    out.append("")
    out.append("const char32_t kDecompPool[] = {")
    out.append(fmt_u32_list(decomp_pool))
    out.append("};")
    out.append("")
    out.append("const CccEntry kCcc[] = {")
    for cp, ccc in ccc_entries:
        out.append(f"    {{0x{cp:X}, {ccc}}},")
    out.append("};")
    out.append(f"const size_t kCccCount = {len(ccc_entries)};")
    out.append("")
    out.append("const CompEntry kComp[] = {")
    for lead, trail, composed in sorted(comp_pairs, key=lambda p: (p[0] << 24) | p[1]):
        out.append(f"    {{0x{((lead << 24) | trail):X}ULL, 0x{composed:X}}},")
    out.append("};")
    out.append(f"const size_t kCompCount = {len(comp_pairs)};")
    out.append("")
    out.append("const FoldEntry kFold[] = {")
    for cp, cps in fold_entries:
        seq = cps + [0] * (3 - len(cps))
        out.append(
            f"    {{0x{cp:X}, {{0x{seq[0]:X}, 0x{seq[1]:X}, 0x{seq[2]:X}}}, {len(cps)}}},"
        )
    out.append("};")
    out.append(f"const size_t kFoldCount = {len(fold_entries)};")
    out.append("")
    out.append("const char32_t kWhitespace[] = {")
    out.append(fmt_u32_list(ws))
    out.append("};")
    out.append(f"const size_t kWhitespaceCount = {len(ws)};")
    out.append("")
    out.append("}  // namespace comprag::canon::tables")

    (root / "core/src/unicode_tables.hpp").write_text(hpp)
    (root / "core/src/unicode_tables.cpp").write_text("\n".join(out) + "\n")
    print(
        f"tables: {len(decomp_entries)} decompositions, {len(ccc_entries)} ccc, "
        f"{len(comp_pairs)} composition pairs, {len(fold_entries)} case folds, "
        f"{len(ws)} whitespace"
    )


INTERESTING = [
    "",
    "plain ascii text",
    "Gio's",
    "  gio's ",
    "GIO'S\t",
    "café",          # precomposed
    "café",          # decomposed
    "À̖",       # marks out of canonical order
    "À̖",
    "q̣̇",       # classic reordering example
    "ḍ̇",
    "क़",              # composition exclusion (stays decomposed in NFC)
    "क़",
    "Å",              # singleton: ANGSTROM SIGN -> Å
    "Ω",              # singleton: OHM SIGN -> Ω
    "豈",              # CJK compatibility singleton
    "각",  # Hangul jamo -> syllable
    "각",
    "한글",
    "straße",         # ß full-folds to ss
    "İstanbul",       # İ folds to i + combining dot
    "Σςσ",  # sigma forms
    "ﬁle",            # ﬁ ligature case-folds
    " padded ",  # NBSP is whitespace for trim
    "　wide　",
    "á́́",
    "̈́",              # non-starter decomposition
    "Ḕ and Ḕ",   # multi-level composition
    "Ḕ",       # composes in two steps
    "mixed é café 가 가",
]

ALPHABETS = [
    [chr(c) for c in range(0x20, 0x7F)],
    [chr(c) for c in range(0xC0, 0x100)],
    [chr(c) for c in range(0x300, 0x370) if not is_surrogate(c)],
    [chr(c) for c in range(0x1100, 0x1113)] + [chr(c) for c in range(0x1161, 0x1176)]
    + [chr(c) for c in range(0x11A8, 0x11C3)],
    [chr(c) for c in range(0xAC00, 0xAC30)],
    [chr(c) for c in range(0x391, 0x3CA)],
    [chr(c) for c in range(0x410, 0x450)],
    [chr(c) for c in range(0x915, 0x940)] + ["़"],
    ["ß", "İ", "ﬁ", "Å", "Ω", "豈", " ", " ", "　"],
]


def write_canon_cases(root: Path):
    rng = random.Random(20240917)
    cases = list(INTERESTING)
    for _ in range(300):
        alphabet = rng.choice(ALPHABETS)
        n = rng.randint(1, 24)
        cases.append("".join(rng.choice(alphabet) for _ in range(n)))
    rows = []
    for s in cases:
        nfc = unicodedata.normalize("NFC", s)
        rows.append(
            {
                "input": s,
                "nfc": nfc,
                "casefold": s.casefold(),
                "canonical_key": nfc.casefold().strip(),
            }
        )
    path = root / "tests/fixtures/canon_cases.json"
    path.write_text(json.dumps(rows, ensure_ascii=True, indent=1) + "\n")
    print(f"canon cases: {len(rows)} -> {path}")


def main():
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent
    (root / "core/src").mkdir(parents=True, exist_ok=True)
    (root / "tests/fixtures").mkdir(parents=True, exist_ok=True)
    write_tables(root)
    write_canon_cases(root)


if __name__ == "__main__":
    main()
