"""Tokenization, idf statistics, and token-level string similarity metrics.

Everything downstream (patterns, the tagger, the reference detector, the
LSH filter) operates on :class:`TokenSeq` values produced here.  All three
similarity metrics are token-level: snowclone variants substitute whole
words, so character-level distances would mostly measure spelling.
"""
from __future__ import annotations

import math
import re
import statistics
from bisect import bisect_right
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

# Whitespace-delimited chunks; within a chunk, alphanumeric runs joined by
# internal apostrophes survive ("don't"), every other character is dropped.
_CHUNK = re.compile(r"\S+")
_WORDPART = re.compile(r"[^\W_]+(?:'[^\W_]+)*")


@dataclass(frozen=True)
class TokenSeq:
    """A normalized token sequence plus the character span it came from.

    ``source_span`` is (start, end) into the original text, covering the
    first kept character of the first token through the last kept character
    of the last token.  Sequences built directly from token lists carry the
    degenerate span (0, 0).
    """

    tokens: tuple[str, ...]
    source_span: tuple[int, int] = (0, 0)

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[str]:
        return iter(self.tokens)

    def __bool__(self) -> bool:
        return bool(self.tokens)

    @property
    def degenerate(self) -> bool:
        """True for the empty sequence (no word characters in the input)."""
        return not self.tokens

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> "TokenSeq":
        """Build a sequence from pre-split tokens, normalizing case.

        Raises ValueError if any token contains whitespace.
        """
        toks = tuple(t.lower() for t in tokens)
        for t in toks:
            if not t or any(ch.isspace() for ch in t):
                raise ValueError(f"invalid token {t!r}: empty or contains whitespace")
        return cls(toks)


def tokenize(text: str) -> TokenSeq:
    """Lowercase and split ``text`` on whitespace, stripping punctuation.

    Apostrophes are kept when they sit inside a word ("don't"); curly
    apostrophes are normalized to straight ones.  A chunk that is pure
    punctuation yields no token.  Empty input yields an empty (degenerate)
    sequence.
    """
    tokens: list[str] = []
    first_start: int | None = None
    last_end = 0
    for chunk in _CHUNK.finditer(text):
        low = chunk.group().lower().replace("’", "'")
        parts = _WORDPART.findall(low)
        if not parts:
            continue
        tokens.append("".join(parts))
        m_first = _WORDPART.search(low)
        start = chunk.start() + m_first.start()
        # End of the last word part within the chunk.
        end = start
        for m in _WORDPART.finditer(low):
            end = chunk.start() + m.end()
        if first_start is None:
            first_start = start
        last_end = end
    span = (first_start, last_end) if first_start is not None else (0, 0)
    return TokenSeq(tuple(tokens), span)


def _toks(a: TokenSeq | Sequence[str]) -> tuple[str, ...]:
    if isinstance(a, TokenSeq):
        return a.tokens
    return tuple(a)


def edit_distance(a: TokenSeq | Sequence[str], b: TokenSeq | Sequence[str]) -> int:
    """Token-level Levenshtein distance (insert, delete, substitute at cost 1)."""
    x, y = _toks(a), _toks(b)
    if not x:
        return len(y)
    if not y:
        return len(x)
    prev = list(range(len(y) + 1))
    for i, xi in enumerate(x, start=1):
        cur = [i] + [0] * len(y)
        for j, yj in enumerate(y, start=1):
            cost = 0 if xi == yj else 1
            cur[j] = min(prev[j - 1] + cost, prev[j] + 1, cur[j - 1] + 1)
        prev = cur
    return prev[-1]


def lcs_length(a: TokenSeq | Sequence[str], b: TokenSeq | Sequence[str]) -> int:
    """Length of the longest common subsequence of tokens."""
    x, y = _toks(a), _toks(b)
    if not x or not y:
        return 0
    prev = [0] * (len(y) + 1)
    for xi in x:
        cur = [0] * (len(y) + 1)
        for j, yj in enumerate(y, start=1):
            if xi == yj:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = max(prev[j], cur[j - 1])
        prev = cur
    return prev[-1]


def longest_common_substring(a: TokenSeq | Sequence[str], b: TokenSeq | Sequence[str]) -> int:
    """Length of the longest contiguous run of tokens shared by both sequences."""
    x, y = _toks(a), _toks(b)
    if not x or not y:
        return 0
    best = 0
    prev = [0] * (len(y) + 1)
    for xi in x:
        cur = [0] * (len(y) + 1)
        for j, yj in enumerate(y, start=1):
            if xi == yj:
                cur[j] = prev[j - 1] + 1
                if cur[j] > best:
                    best = cur[j]
        prev = cur
    return best


@dataclass(frozen=True)
class IdfTable:
    """Smoothed inverse document frequencies over a corpus.

    idf(t) = ln((doc_count + 1) / (df(t) + 1)) + 1 for known tokens; unseen
    tokens get ``default_idf`` = ln(doc_count + 1) + 1, the value a token
    with df = 0 would have.  Immutable after construction.
    """

    doc_count: int
    df: dict[str, int]
    default_idf: float

    def idf(self, token: str) -> float:
        n = self.df.get(token)
        if n is None:
            return self.default_idf
        return math.log((self.doc_count + 1) / (n + 1)) + 1.0

    @cached_property
    def _quartile_cuts(self) -> tuple[float, float, float]:
        values = sorted(self.idf(t) for t in self.df)
        if len(values) < 2:
            v = values[0] if values else self.default_idf
            return (v, v, v)
        q1, q2, q3 = statistics.quantiles(values, n=4, method="inclusive")
        return (q1, q2, q3)

    def idf_quartile(self, token: str) -> int:
        """Quartile bucket (1 = lowest idf, 4 = highest) within this table."""
        return 1 + bisect_right(list(self._quartile_cuts), self.idf(token))


def build_idf(corpus: Iterable[str]) -> IdfTable:
    """Count document frequencies over raw documents and build an IdfTable.

    Documents that tokenize to nothing are skipped; a corpus with no usable
    documents raises ValueError.
    """
    df: dict[str, int] = {}
    doc_count = 0
    for doc in corpus:
        seq = tokenize(doc)
        if not seq:
            continue
        doc_count += 1
        for tok in set(seq.tokens):
            df[tok] = df.get(tok, 0) + 1
    if doc_count == 0:
        raise ValueError("empty corpus: no documents with word characters")
    return IdfTable(doc_count=doc_count, df=df, default_idf=math.log(doc_count + 1) + 1.0)


def build_idf_from_token_seqs(seqs: Iterable[TokenSeq]) -> IdfTable:
    """Like :func:`build_idf` but over already-tokenized documents."""
    df: dict[str, int] = {}
    doc_count = 0
    for seq in seqs:
        if not seq:
            continue
        doc_count += 1
        for tok in set(seq.tokens):
            df[tok] = df.get(tok, 0) + 1
    if doc_count == 0:
        raise ValueError("empty corpus: no non-empty token sequences")
    return IdfTable(doc_count=doc_count, df=df, default_idf=math.log(doc_count + 1) + 1.0)


def read_corpus(path: str | Path) -> Iterator[str]:
    """Yield documents from a newline-delimited UTF-8 text file, one per line."""
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            yield line.rstrip("\n")


def save_idf(table: IdfTable, path: str | Path) -> None:
    """Persist a table as a versioned TSV (header line, then token TAB df)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"snowclone-idf\tv1\tdoc_count={table.doc_count}\n")
        for tok in sorted(table.df):
            fh.write(f"{tok}\t{table.df[tok]}\n")


def load_idf(path: str | Path) -> IdfTable:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if len(header) < 3 or header[0] != "snowclone-idf" or header[1] != "v1":
            raise ValueError(f"{path}: not a v1 idf table")
        doc_count = int(header[2].removeprefix("doc_count="))
        df: dict[str, int] = {}
        for line in fh:
            if not line.strip():
                continue
            tok, _, n = line.rstrip("\n").partition("\t")
            df[tok] = int(n)
    return IdfTable(doc_count=doc_count, df=df, default_idf=math.log(doc_count + 1) + 1.0)


def idf_stats(
    s: TokenSeq | Sequence[str],
    c: TokenSeq | Sequence[str],
    table: IdfTable,
) -> tuple[float, float, float, float]:
    """idf summary of shared and seed-only words.

    Returns (mean_shared, max_shared, mean_s_only, max_s_only) where shared
    is the token-set intersection of s and c and s_only is set(s) - set(c).
    Statistics over an empty set are 0.
    """
    s_toks, c_toks = set(_toks(s)), set(_toks(c))
    if not s_toks:
        raise ValueError("idf_stats requires a non-empty seed sequence")
    shared = [table.idf(t) for t in s_toks & c_toks]
    s_only = [table.idf(t) for t in s_toks - c_toks]
    mean_shared = sum(shared) / len(shared) if shared else 0.0
    max_shared = max(shared) if shared else 0.0
    mean_s_only = sum(s_only) / len(s_only) if s_only else 0.0
    max_s_only = max(s_only) if s_only else 0.0
    return (mean_shared, max_shared, mean_s_only, max_s_only)
