"""Snowclone patterns: wildcard templates over token sequences.

A pattern is a sequence of literal tokens and wildcards, e.g.
``one does not simply *``.  Each wildcard stands for one or more
tokens.  Patterns are induced from tagged sentences (KEEP/WILD tags)
or recovered from a seed quote plus observed variants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .text import TokenSeq

KEEP = 0
WILD = 1

#: Tag sequence aligned 1:1 with a sentence's tokens.
TagSeq = Sequence[int]

WILDCARD = "*"


class DegeneratePatternError(ValueError):
    """Raised when tags would produce a pattern with no literal tokens."""


@dataclass(frozen=True)
class SnowclonePattern:
    """An ordered mix of literal tokens and wildcards.

    Invariants: no two adjacent wildcards (maximal WILD runs are merged
    into a single ``*``) and at least one literal.  ``origin`` optionally
    records the seed quote the pattern was derived from.
    """

    elements: tuple[str, ...]
    origin: Optional[TokenSeq] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.elements:
            raise DegeneratePatternError("empty pattern")
        if all(e == WILDCARD for e in self.elements):
            raise DegeneratePatternError("pattern has no literal tokens")
        for a, b in zip(self.elements, self.elements[1:]):
            if a == WILDCARD and b == WILDCARD:
                raise ValueError("adjacent wildcards must be merged")

    @property
    def literals(self) -> tuple[str, ...]:
        return tuple(e for e in self.elements if e != WILDCARD)

    @property
    def n_wildcards(self) -> int:
        return sum(1 for e in self.elements if e == WILDCARD)

    def to_text(self) -> str:
        return " ".join(self.elements)

    def __str__(self) -> str:
        return self.to_text()


def parse_pattern(text: str, origin: Optional[TokenSeq] = None) -> SnowclonePattern:
    """Inverse of :meth:`SnowclonePattern.to_text`; round-trip exact."""
    elements = tuple(text.split())
    return SnowclonePattern(elements, origin=origin)


def _merge_tags(s: TokenSeq, t: TagSeq) -> tuple[str, ...]:
    """KEEP positions become literals, maximal WILD runs a single ``*``."""
    if len(s) != len(t):
        raise ValueError(f"length mismatch: {len(s)} tokens vs {len(t)} tags")
    out: list[str] = []
    for tok, tag in zip(s, t):
        if tag == KEEP:
            out.append(tok)
        elif not out or out[-1] != WILDCARD:
            out.append(WILDCARD)
    return tuple(out)


def from_tags(s: TokenSeq, t: TagSeq) -> SnowclonePattern:
    """Build a pattern from a sentence and its KEEP/WILD tags."""
    return SnowclonePattern(_merge_tags(s, t), origin=s)


def match(p: SnowclonePattern, c) -> Optional[tuple[tuple[str, ...], ...]]:
    """Match ``c`` against ``p``, anchored at both ends.

    Returns one binding per wildcard (the consumed token span) when the
    sentence is generated by the pattern, else None.  Each wildcard must
    consume at least one token.  Among valid matches the bindings are
    leftmost-shortest: every wildcard takes the fewest tokens that still
    allow the rest of the pattern to match.
    """
    toks = tuple(c)
    elems = p.elements
    k, n = len(elems), len(toks)

    # reach[i][j]: elements i.. can consume tokens j.. exactly.
    reach = [[False] * (n + 1) for _ in range(k + 1)]
    reach[k][n] = True
    for i in range(k - 1, -1, -1):
        if elems[i] == WILDCARD:
            # True iff the tail matches after consuming >= 1 token.
            tail_any = False
            for j in range(n, -1, -1):
                reach[i][j] = tail_any
                tail_any = tail_any or reach[i + 1][j]
        else:
            for j in range(n):
                reach[i][j] = toks[j] == elems[i] and reach[i + 1][j + 1]
    if not reach[0][0]:
        return None

    bindings: list[tuple[str, ...]] = []
    pos = 0
    for i, e in enumerate(elems):
        if e == WILDCARD:
            take = 1
            while not reach[i + 1][pos + take]:
                take += 1
            bindings.append(toks[pos:pos + take])
            pos += take
        else:
            pos += 1
    return tuple(bindings)


def matches(p: SnowclonePattern, c) -> bool:
    return match(p, c) is not None


def _aligned_keeps(seed: Sequence[str], inst: Sequence[str]) -> set:
    """Seed positions aligned as exact token matches under the cheapest
    edit alignment of inst to seed; ties prefer more matched positions."""
    n, m = len(seed), len(inst)
    BIG = (n + m + 1, 0)
    # dp value is (edit cost, -matched positions), compared lexicographically.
    dp = [[BIG] * (m + 1) for _ in range(n + 1)]
    dp[0][0] = (0, 0)
    for i in range(n + 1):
        for j in range(m + 1):
            if i > 0:
                cand = (dp[i - 1][j][0] + 1, dp[i - 1][j][1])
                if cand < dp[i][j]:
                    dp[i][j] = cand
            if j > 0:
                cand = (dp[i][j - 1][0] + 1, dp[i][j - 1][1])
                if cand < dp[i][j]:
                    dp[i][j] = cand
            if i > 0 and j > 0:
                prev = dp[i - 1][j - 1]
                if seed[i - 1] == inst[j - 1]:
                    cand = (prev[0], prev[1] - 1)
                else:
                    cand = (prev[0] + 1, prev[1])
                if cand < dp[i][j]:
                    dp[i][j] = cand

    keeps = set()
    i, j = n, m
    while i > 0 or j > 0:
        here = dp[i][j]
        if i > 0 and j > 0:
            prev = dp[i - 1][j - 1]
            if seed[i - 1] == inst[j - 1] and here == (prev[0], prev[1] - 1):
                keeps.add(i - 1)
                i, j = i - 1, j - 1
                continue
            if seed[i - 1] != inst[j - 1] and here == (prev[0] + 1, prev[1]):
                i, j = i - 1, j - 1
                continue
        if i > 0 and here == (dp[i - 1][j][0] + 1, dp[i - 1][j][1]):
            i -= 1
            continue
        j -= 1
    return keeps


def induce_pattern(seed: TokenSeq, instances: Iterable[TokenSeq]) -> SnowclonePattern:
    """Recover a pattern from a seed quote and observed variants.

    Each instance is aligned to the seed by edit distance; seed tokens
    that survive as exact matches in every instance stay literal, the
    rest become wildcards.
    """
    insts = [tuple(c) for c in instances]
    if not insts:
        raise ValueError("need at least one instance")
    seed_toks = tuple(seed)
    keeps = set(range(len(seed_toks)))
    for inst in insts:
        keeps &= _aligned_keeps(seed_toks, inst)
    tags = [KEEP if i in keeps else WILD for i in range(len(seed_toks))]
    return from_tags(seed, tags)


@dataclass(frozen=True)
class AnnotationSet:
    """One annotator's patterns for one sentence: 1-3 tag sequences."""

    sentence: TokenSeq
    tag_seqs: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not 1 <= len(self.tag_seqs) <= 3:
            raise ValueError("expected 1-3 tag sequences per sentence")
        for t in self.tag_seqs:
            if len(t) != len(self.sentence):
                raise ValueError("tag sequence does not match sentence length")


def _check_aligned(A: Sequence[AnnotationSet], B: Sequence[AnnotationSet]):
    if len(A) != len(B):
        raise ValueError(f"annotation lists differ in length: {len(A)} vs {len(B)}")
    for a, b in zip(A, B):
        if tuple(a.sentence) != tuple(b.sentence):
            raise ValueError("annotation sets are not sentence-aligned")


def exact_match_agreement(A: Sequence[AnnotationSet], B: Sequence[AnnotationSet]) -> float:
    """Fraction of sentences where the annotators share a merged pattern.

    Comparison is on merged wildcard form, so KEEP,WILD,WILD and
    KEEP,WILD,KEEP differ but WILD,WILD,KEEP and WILD,KEEP merge alike
    only if their literal positions coincide.  All-WILD annotations are
    compared as a bare wildcard rather than rejected.
    """
    _check_aligned(A, B)
    if not A:
        return 1.0
    hits = 0
    for a, b in zip(A, B):
        forms_a = {_merge_tags(a.sentence, t) for t in a.tag_seqs}
        forms_b = {_merge_tags(b.sentence, t) for t in b.tag_seqs}
        if forms_a & forms_b:
            hits += 1
    return hits / len(A)


def relaxed_match_agreement(A: Sequence[AnnotationSet], B: Sequence[AnnotationSet]) -> float:
    """Mean over sentences of the best positionwise tag agreement."""
    _check_aligned(A, B)
    if not A:
        return 1.0
    total = 0.0
    for a, b in zip(A, B):
        n = len(a.sentence)
        best = 0.0
        for ta in a.tag_seqs:
            for tb in b.tag_seqs:
                agree = sum(1 for x, y in zip(ta, tb) if x == y) / n
                best = max(best, agree)
        total += best
    return total / len(A)
