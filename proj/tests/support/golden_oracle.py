#!/usr/bin/env python3
"""End-to-end brute-force recomputation of the food-delivery golden scenario.

Independently re-implements every stage — record rendering, content hashing,
feature-hashed TF embedding, cosine retrieval, desirability scoring, min-max
fusion — and freezes the expected outcome into
tests/fixtures/golden_expected.json. The C++ acceptance suite must reproduce
these values; this script is never allowed to peek at the library.
"""

import csv
import json
import math
import re
import struct
import sys
import unicodedata
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))
from murmur3_reference import assign_hash, murmur3_x64_128

QUERY = "What are the best options for Italian food nearby?"
K = 8
ALPHA = 0.5
DIM = 256
TARGET_SIZE = 64
CUTOFF_M = 5
ITALIAN = {"Gio's", "Napoli Express", "Trattoria Lucca", "Bella Vita"}


def render_lines(record: dict) -> list[str]:
    lines = []
    for key in sorted(record["properties"].keys()):
        value = record["properties"][key].replace("\n", " ").replace("\r", " ")
        lines.append(f"{key}: {value}".strip())
    for raw in record.get("text", "").split("\n"):
        stripped = raw.strip()
        if stripped:
            lines.append(stripped)
    return lines


def chunk_bodies(record: dict) -> list[str]:
    lines = render_lines(record)
    counts = [len(line.split()) for line in lines]
    assert sum(counts) <= TARGET_SIZE, f"fixture record too large: {record['object_key']}"
    return ["\n".join(lines)]


def embed_tokens(text: str) -> list[bytes]:
    return re.findall(rb"[a-z0-9\x80-\xff]+", text.encode("utf-8").lower())


def embed(text: str) -> list[float]:
    counts = [0.0] * DIM
    for token in embed_tokens(text):
        h1, _ = murmur3_x64_128(token, 0)
        counts[h1 % DIM] += 1.0
    norm = math.sqrt(sum(c * c for c in counts))
    if norm == 0.0:
        return [0.0] * DIM
    # float32 cast to match the stored vectors exactly
    return [struct.unpack("f", struct.pack("f", c / norm))[0] for c in counts]


def cosine(a: list[float], b: list[float]) -> float:
    dot = 0.0
    na = 0.0
    nb = 0.0
    for x, y in zip(a, b):
        dot += x * y
        na += x * x
        nb += y * y
    if na == 0.0 or nb == 0.0:
        return 0.0
    return dot / math.sqrt(na * nb)


def desirability(nps: float, time_min: float, review: float, prox: float) -> float:
    clamp = lambda t: min(1.0, max(0.0, t))
    return (
        0.25 * clamp((nps + 100.0) / 200.0)
        + 0.25 * (1.0 - clamp((time_min - 10.0) / 50.0))
        + 0.25 * clamp(review / 5.0)
        + 0.25 * (1.0 - clamp(prox / 10.0))
    )


def main():
    fixtures = Path(__file__).resolve().parent.parent / "fixtures"

    # chunks: one per restaurant record (records are sized to fit one chunk)
    chunks = []  # (hash, object_key, body)
    for line in (fixtures / "restaurants.jsonl").read_text().splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        for body in chunk_bodies(record):
            chunks.append((assign_hash(record["object_key"], body), record["object_key"], body))
    assert len(chunks) == 20, len(chunks)
    assert len({h for h, _, _ in chunks}) == 20

    # retrieval: exhaustive cosine, top-K by (-similarity, hash)
    qvec = embed(QUERY)
    sims = {h: cosine(qvec, embed(body)) for h, _, body in chunks}
    ranked = sorted(chunks, key=lambda c: (-sims[c[0]], c[0]))[:K]

    # out-of-model scores
    scores = {}
    with open(fixtures / "restaurant_metrics.csv", newline="") as f:
        for row in csv.DictReader(f):
            scores[row["object_key"]] = desirability(
                float(row["nps"]),
                float(row["response_time_min"]),
                float(row["review_score"]),
                float(row["proximity_km"]),
            )
    assert len(scores) == 20
    filtration_order = sorted(scores, key=lambda k: (-scores[k], k))
    rank_of = {key: i + 1 for i, key in enumerate(filtration_order)}

    lo = min(scores.values())
    hi = max(scores.values())
    minmax = lambda s: (s - lo) / (hi - lo)

    # fuse: alpha * (sim+1)/2 + (1-alpha) * minmax(score), order by (-fused, hash)
    fused_rows = []
    for h, key, _body in ranked:
        det = minmax(scores[key])
        fused = ALPHA * ((sims[h] + 1.0) / 2.0) + (1.0 - ALPHA) * det
        fused_rows.append(
            {
                "chunk_hash": h,
                "object_key": key,
                "semantic": sims[h],
                "deterministic": det,
                "fused": fused,
            }
        )
    fused_rows.sort(key=lambda r: (-r["fused"], r["chunk_hash"]))
    for i, row in enumerate(fused_rows):
        row["final_rank"] = i + 1

    top = fused_rows[0]
    assert top["object_key"] in ITALIAN, (
        f"golden fixture broken: fused winner {top['object_key']} is not italian"
    )

    # filter mode: survivors of cutoff 5, drop unmatched (none here), semantic order
    filter_rows = [
        {"chunk_hash": h, "object_key": key, "filtration_rank": rank_of[key]}
        for h, key, _ in ranked
        if rank_of[key] <= CUTOFF_M
    ]
    assert filter_rows, "golden fixture broken: filter mode keeps nothing"

    out = {
        "params": {
            "query": QUERY,
            "k": K,
            "alpha": ALPHA,
            "dim": DIM,
            "target_size": TARGET_SIZE,
            "cutoff_m": CUTOFF_M,
        },
        "chunk_count": len(chunks),
        "italian_keys": sorted(ITALIAN),
        "desirability": {k: scores[k] for k in sorted(scores)},
        "filtration_order": filtration_order,
        "retrieval": [
            {"chunk_hash": h, "object_key": key, "similarity": sims[h]} for h, key, _ in ranked
        ],
        "fuse_evidence": fused_rows,
        "top": {"object_key": top["object_key"], "chunk_hash": top["chunk_hash"]},
        "filter_evidence": filter_rows,
    }
    path = fixtures / "golden_expected.json"
    path.write_text(json.dumps(out, indent=1) + "\n")
    print(f"golden winner: {top['object_key']} (fused {top['fused']:.6f}) -> {path}")
    print("filtration top 5:", filtration_order[:5])
    print("retrieved:", [key for _, key, _ in ranked])


if __name__ == "__main__":
    main()
