"""MinHash signatures and LSH banding for fast seed retrieval.

The live pipeline cannot afford to run the detector on every (seed,
sentence) pair, so sentences are first matched against an LSH index of
the seed quotes.  Shingles are word unigrams and bigrams; the default
banding (k=128, b=64, r=2) has its S-curve threshold at (1/64)^(1/2) =
0.125, deliberately below the 0.2 working threshold so the index
over-retrieves and a Jaccard post-filter trims the rest.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .text import TokenSeq

DEFAULT_K = 128
DEFAULT_BANDS = 64
DEFAULT_ROWS = 2

_U64 = np.uint64


def shingle(s: TokenSeq | Sequence[str]) -> frozenset[str]:
    """Word unigrams plus adjacent bigrams (joined with '_')."""
    toks = tuple(s)
    grams = set(toks)
    grams.update(f"{a}_{b}" for a, b in zip(toks, toks[1:]))
    return frozenset(grams)


def _base_hash(sh: str) -> int:
    """Stable 64-bit shingle hash (blake2b, platform-independent)."""
    return int.from_bytes(
        hashlib.blake2b(sh.encode("utf-8"), digest_size=8).digest(), "big"
    )


_param_cache: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}


def _hash_params(k: int, hash_seed: int) -> tuple[np.ndarray, np.ndarray]:
    """k multiply-shift functions h_i(x) = (A_i*x + B_i) mod 2^64, A_i odd."""
    key = (k, hash_seed)
    if key not in _param_cache:
        rng = random.Random(hash_seed)
        a = np.array([rng.getrandbits(64) | 1 for _ in range(k)], dtype=_U64)
        b = np.array([rng.getrandbits(64) for _ in range(k)], dtype=_U64)
        _param_cache[key] = (a, b)
    return _param_cache[key]


@dataclass(frozen=True, eq=False)
class MinHashSignature:
    values: np.ndarray
    k: int
    hash_seed: int


def minhash_signature(
    sh: Iterable[str], k: int = DEFAULT_K, hash_seed: int = 0
) -> MinHashSignature:
    """Per-function minimum of the hashed shingle set."""
    base = np.array([_base_hash(x) for x in sh], dtype=_U64)
    if base.size == 0:
        raise ValueError("cannot sign an empty shingle set")
    a, b = _hash_params(k, hash_seed)
    # (k, n) table of h_i(x_j); uint64 arithmetic wraps mod 2^64.
    table = a[:, None] * base[None, :] + b[:, None]
    return MinHashSignature(values=table.min(axis=1), k=k, hash_seed=hash_seed)


def estimate_jaccard(a: MinHashSignature, b: MinHashSignature) -> float:
    """Fraction of agreeing signature positions."""
    if a.k != b.k or a.hash_seed != b.hash_seed:
        raise ValueError("signatures use different parameters")
    return float(np.mean(a.values == b.values))


def collision_probability(j: float, b: int = DEFAULT_BANDS, r: int = DEFAULT_ROWS) -> float:
    """S-curve: chance two sets with Jaccard j share at least one band."""
    return 1.0 - (1.0 - j**r) ** b


@dataclass
class LshIndex:
    """Banded MinHash index over seed sentences; immutable once built."""

    k: int
    bands: int
    rows_per_band: int
    hash_seed: int
    buckets: dict[tuple[int, bytes], set[str]] = field(default_factory=dict)
    seeds: dict[str, tuple[TokenSeq, MinHashSignature]] = field(default_factory=dict)


def _band_keys(sig: MinHashSignature, bands: int, rows: int):
    for i in range(bands):
        yield (i, sig.values[i * rows : (i + 1) * rows].tobytes())


def build_index(
    seeds: Iterable[tuple[str, TokenSeq]],
    k: int = DEFAULT_K,
    b: int = DEFAULT_BANDS,
    r: int = DEFAULT_ROWS,
    hash_seed: int = 0,
) -> LshIndex:
    if b * r != k:
        raise ValueError(f"bands*rows must equal k: {b}*{r} != {k}")
    ix = LshIndex(k=k, bands=b, rows_per_band=r, hash_seed=hash_seed)
    for sid, seq in seeds:
        sig = minhash_signature(shingle(seq), k=k, hash_seed=hash_seed)
        ix.seeds[sid] = (seq, sig)
        for key in _band_keys(sig, b, r):
            ix.buckets.setdefault(key, set()).add(sid)
    return ix


def query_signature(ix: LshIndex, sig: MinHashSignature) -> set[str]:
    """Ids of every indexed seed sharing at least one band with sig."""
    if sig.k != ix.k or sig.hash_seed != ix.hash_seed:
        raise ValueError("signature does not match index parameters")
    out: set[str] = set()
    for key in _band_keys(sig, ix.bands, ix.rows_per_band):
        out |= ix.buckets.get(key, set())
    return out


def query(ix: LshIndex, c: TokenSeq | Sequence[str]) -> set[str]:
    """Ids of every indexed seed sharing at least one band with c."""
    grams = shingle(c)
    if not grams:
        return set()
    sig = minhash_signature(grams, k=ix.k, hash_seed=ix.hash_seed)
    return query_signature(ix, sig)
