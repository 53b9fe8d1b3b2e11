"""Dataset ingestion, the group-constrained splitter, and synthetic data.

The on-disk format for both datasets is newline-delimited JSON.  Pattern
records are {"tokens": [...], "tags": [0|1,...], "group": "..."} and
reference records are {"seed": [...], "candidate": [...], "label": 0|1,
"seed_id": "..."}.  Loaders are lenient: malformed records are skipped
with a warning naming the line, so one bad row does not sink a file.

The synthetic generator builds scaffold patterns with planted slot
positions.  Scaffold and slot vocabularies are disjoint, so a token's
identity alone determines its gold tag and tagger training data is
linearly separable by construction.
"""

from __future__ import annotations

import json
import math
import random
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence, TypeVar

from .detector import ReferencePair
from .pattern import KEEP, WILD
from .tagger import TaggedExample
from .text import TokenSeq

T = TypeVar("T")


@dataclass(frozen=True)
class SplitSpec:
    """Train/dev/test ratios plus the shuffle seed.

    dev may be zero (two-way splits for repeated cross-validation);
    train and test must be positive and the three must sum to 1.
    """

    train: float = 0.60
    dev: float = 0.20
    test: float = 0.20
    split_seed: int = 0

    def __post_init__(self):
        if self.train <= 0 or self.test <= 0 or self.dev < 0:
            raise ValueError("train and test ratios must be positive, dev >= 0")
        if not math.isclose(self.train + self.dev + self.test, 1.0, abs_tol=1e-9):
            raise ValueError("split ratios must sum to 1")


def group_split(
    items: Iterable[T],
    key: Callable[[T], str],
    spec: SplitSpec = SplitSpec(),
) -> tuple[list[T], list[T], list[T]]:
    """Partition items into train/dev/test without splitting any group.

    Groups are taken in first-appearance order, shuffled by split_seed,
    then greedily assigned to the split with the largest remaining item
    deficit (ties: train, then dev, then test).  Output lists preserve
    the input item order.
    """
    items = list(items)
    groups: dict[str, list[T]] = {}
    for it in items:
        groups.setdefault(key(it), []).append(it)
    if len(groups) < 3:
        raise ValueError(f"need at least 3 groups to split, got {len(groups)}")

    names = list(groups)
    random.Random(spec.split_seed).shuffle(names)
    targets = (
        spec.train * len(items),
        spec.dev * len(items),
        spec.test * len(items),
    )
    counts = [0, 0, 0]
    assign: dict[str, int] = {}
    for name in names:
        deficits = [targets[i] - counts[i] for i in range(3)]
        best = max(range(3), key=lambda i: (deficits[i], -i))
        assign[name] = best
        counts[best] += len(groups[name])

    out: tuple[list[T], list[T], list[T]] = ([], [], [])
    for it in items:
        out[assign[key(it)]].append(it)
    return out


def _load_ndjson(path: str | Path, build) -> list:
    out = []
    skipped = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(build(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
                warnings.warn(f"{path}:{lineno}: skipping record ({e})")
                skipped += 1
    if not out and not skipped:
        warnings.warn(f"{path}: no records")
    if skipped:
        warnings.warn(f"{path}: skipped {skipped} malformed record(s)")
    return out


def load_pattern_dataset(path: str | Path) -> list[TaggedExample]:
    """Read tagger examples; order-preserving, bad records skipped."""

    def build(rec) -> TaggedExample:
        return TaggedExample(
            sentence=TokenSeq.from_tokens(rec["tokens"]),
            gold=tuple(int(t) for t in rec["tags"]),
            group_id=rec["group"],
        )

    return _load_ndjson(path, build)


def load_reference_dataset(path: str | Path) -> list[ReferencePair]:
    """Read detector pairs; order-preserving, bad records skipped."""

    def build(rec) -> ReferencePair:
        return ReferencePair(
            seed=TokenSeq.from_tokens(rec["seed"]),
            candidate=TokenSeq.from_tokens(rec["candidate"]),
            label=int(rec["label"]),
            seed_id=rec["seed_id"],
        )

    return _load_ndjson(path, build)


def save_pattern_dataset(examples: Sequence[TaggedExample], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(
                json.dumps(
                    {
                        "tokens": list(ex.sentence),
                        "tags": list(ex.gold),
                        "group": ex.group_id,
                    }
                )
                + "\n"
            )


def save_reference_dataset(pairs: Sequence[ReferencePair], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in pairs:
            fh.write(
                json.dumps(
                    {
                        "seed": list(p.seed),
                        "candidate": list(p.candidate),
                        "label": p.label,
                        "seed_id": p.seed_id,
                    }
                )
                + "\n"
            )


@dataclass(frozen=True)
class SynthConfig:
    n_patterns: int = 12
    instances_per_pattern: int = 9
    scaffold_vocab: int = 10
    slot_vocab: int = 30
    negative_rate: float = 0.64
    rng_seed: int = 0

    def __post_init__(self):
        counts = (
            self.n_patterns,
            self.instances_per_pattern,
            self.scaffold_vocab,
            self.slot_vocab,
        )
        if any(c < 1 for c in counts):
            raise ValueError("all synth counts must be positive")
        if self.scaffold_vocab < 5:
            raise ValueError("scaffold_vocab must be at least 5 (shortest frame)")
        if not 0.0 <= self.negative_rate < 1.0:
            raise ValueError("negative_rate must be in [0, 1)")


def synth_generate(
    cfg: SynthConfig = SynthConfig(),
) -> tuple[list[TaggedExample], list[ReferencePair]]:
    """Generate a tagger dataset and a detector dataset from one seed.

    Per pattern: instances_per_pattern tagged instances; the same count
    of detector positives against a fresh seed instance (the first being
    the identity pair), and enough negatives to hit negative_rate.
    Negatives are mostly instances of other patterns, the rest shuffled
    copies of own instances (reshuffled until they stop matching the
    pattern, so no negative is secretly a positive).
    """
    rng = random.Random(cfg.rng_seed)
    scaffold = [f"w{i:03d}" for i in range(cfg.scaffold_vocab)]
    slots = [f"f{i:03d}" for i in range(cfg.slot_vocab)]

    # Each frame is a sample of distinct scaffold types, so with the
    # default vocab every type recurs in several different patterns.
    # Token identity then transfers from training patterns to held-out
    # groups instead of being memorized per pattern.
    patterns = []
    for p in range(cfg.n_patterns):
        length = rng.randint(5, min(9, cfg.scaffold_vocab))
        # Wildcard slots are interior and non-adjacent: adjacent
        # wildcards would merge into one at induction, and literal
        # sentence edges keep boundary cues consistent across patterns.
        while True:
            wild_at = frozenset(rng.sample(range(1, length - 1), rng.randint(1, 2)))
            if all(abs(a - b) > 1 for a in wild_at for b in wild_at if a != b):
                break
        frame = rng.sample(scaffold, length)
        patterns.append((f"p{p:03d}", frame, wild_at))

    def instance(frame, wild_at) -> TokenSeq:
        return TokenSeq.from_tokens(
            [
                rng.choice(slots) if i in wild_at else tok
                for i, tok in enumerate(frame)
            ]
        )

    tagger_data: list[TaggedExample] = []
    for gid, frame, wild_at in patterns:
        gold = tuple(WILD if i in wild_at else KEEP for i in range(len(frame)))
        for _ in range(cfg.instances_per_pattern):
            tagger_data.append(TaggedExample(instance(frame, wild_at), gold, gid))

    detector_data: list[ReferencePair] = []
    for pi, (gid, frame, wild_at) in enumerate(patterns):
        seed = instance(frame, wild_at)
        n_pos = cfg.instances_per_pattern
        detector_data.append(ReferencePair(seed, seed, 1, gid))
        for _ in range(n_pos - 1):
            detector_data.append(
                ReferencePair(seed, instance(frame, wild_at), 1, gid)
            )

        rate = cfg.negative_rate
        n_neg = round(n_pos * rate / (1.0 - rate))
        n_shuffled = n_neg // 5 if cfg.n_patterns > 1 else n_neg
        for _ in range(n_neg - n_shuffled):
            oi = rng.randrange(cfg.n_patterns - 1)
            if oi >= pi:
                oi += 1
            _, oframe, owild = patterns[oi]
            detector_data.append(
                ReferencePair(seed, instance(oframe, owild), 0, gid)
            )
        keep_at = [i for i in range(len(frame)) if i not in wild_at]
        for _ in range(n_shuffled):
            toks = list(instance(frame, wild_at))
            while all(toks[i] == frame[i] for i in keep_at):
                rng.shuffle(toks)
            detector_data.append(
                ReferencePair(seed, TokenSeq.from_tokens(toks), 0, gid)
            )
    return tagger_data, detector_data
