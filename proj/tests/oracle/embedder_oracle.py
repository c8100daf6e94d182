#!/usr/bin/env python3
"""Independent reimplementation of the hashing embedder.

Checks tests/fixtures/embedder/embeddings.json: every vector must match the
recomputed one exactly, and every cosine to 1e-9.

    embedder_oracle.py --check DIR
    embedder_oracle.py --embed "some text"
"""
import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

STOPWORDS = {
    "a", "an", "and", "are", "as", "at", "be", "by", "for", "from", "i",
    "in", "is", "it", "me", "my", "of", "on", "or", "our", "so", "that",
    "the", "this", "to", "was", "were", "will", "with", "you", "your", "we",
}
FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
MASK64 = (1 << 64) - 1


def tokens(text):
    out, cur = [], bytearray()
    for c in text.encode("utf-8"):
        if 65 <= c <= 90:
            cur.append(c + 32)
        elif 97 <= c <= 122 or 48 <= c <= 57 or c >= 0x80:
            cur.append(c)
        elif cur:
            out.append(bytes(cur))
            cur = bytearray()
    if cur:
        out.append(bytes(cur))
    return out


def fnv1a64(data):
    h = FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * FNV_PRIME) & MASK64
    return h


def embed(text, dim=256, quant_bits=20):
    counts = [0.0] * dim
    for tok in tokens(text):
        if tok.decode("utf-8", "surrogateescape") in STOPWORDS:
            continue
        h = fnv1a64(tok)
        counts[h % dim] += -1.0 if (h >> 32) & 1 else 1.0
    sq = sum(v * v for v in counts)
    if sq == 0:
        return [0.0] * dim
    inv = 1.0 / math.sqrt(sq)
    scale = float(1 << quant_bits)
    return [round(v * inv * scale) / scale for v in counts]


def cosine(a, b):
    # Exact rational dot and norms, one rounding at the end.
    dot = sum(Fraction(x) * Fraction(y) for x, y in zip(a, b) if x and y)
    na = sum(Fraction(x) ** 2 for x in a if x)
    nb = sum(Fraction(y) ** 2 for y in b if y)
    if na == 0 or nb == 0:
        return 0.0
    return float(dot) / math.sqrt(float(na * nb))


def check(directory):
    data = json.loads((Path(directory) / "embeddings.json").read_text(encoding="utf-8"))
    dim, bits = data["dimension"], data["quant_bits"]
    texts = data["texts"]
    ours = [embed(t, dim, bits) for t in texts]
    failures = 0
    for i, (text, row) in enumerate(zip(texts, data["vectors"])):
        theirs = [0.0] * dim
        for idx, val in row:
            theirs[idx] = val
        worst = max(abs(x - y) for x, y in zip(ours[i], theirs))
        if worst > 1e-9:
            failures += 1
            print(f"vector {i} ({text!r}) differs by {worst:g}")
    for i, row in enumerate(data["cosine"]):
        for j, value in enumerate(row):
            want = cosine(ours[i], ours[j])
            if abs(want - value) > 1e-9:
                failures += 1
                print(f"cosine[{i}][{j}] = {value!r}, oracle {want!r}")
    n = len(texts)
    print(f"{n} vectors, {n * n} cosines checked, {failures} mismatches")
    return failures == 0


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", metavar="DIR")
    ap.add_argument("--embed", metavar="TEXT")
    ap.add_argument("--dim", type=int, default=256)
    args = ap.parse_args()
    if args.embed is not None:
        v = embed(args.embed, args.dim)
        print(json.dumps([[i, x] for i, x in enumerate(v) if x]))
        return 0
    if args.check:
        return 0 if check(args.check) else 1
    ap.print_usage()
    return 2


if __name__ == "__main__":
    sys.exit(main())
