"""Serving core: seed sets, candidate extraction, and the scan pipeline.

This is the backend half of the browser extension.  A ScanEngine loads the
trained tagger + detector plus a seed-quote list, builds an LSH index over
the seeds, and turns raw page text into character-offset annotations:

    extract candidates -> LSH retrieval -> Jaccard post-filter -> detector.

Everything here is read-only after load, so one engine can serve concurrent
requests.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Sequence

from .detector import (
    DetectorModel,
    classify_features,
    features_from_tags,
    load_detector,
)
from .lsh import (
    DEFAULT_BANDS,
    DEFAULT_K,
    DEFAULT_ROWS,
    LshIndex,
    build_index,
    estimate_jaccard,
    minhash_signature,
    query_signature,
    shingle,
)
from .tagger import TaggerModel, load_tagger, tag
from .text import IdfTable, TokenSeq, load_idf, tokenize

# Expected file names inside a model directory.
TAGGER_FILE = "tagger.model"
DETECTOR_FILE = "detector.model"
IDF_FILE = "idf.tsv"

MIN_CANDIDATE_TOKENS = 3
MAX_CANDIDATE_TOKENS = 60


class ConfigurationError(ValueError):
    """A model, seed set, or config file is missing or malformed."""


@dataclass(frozen=True)
class SeedEntry:
    """One quote the scanner looks for, with its origin for the tooltip."""

    seed_id: str
    quote: TokenSeq
    origin_title: str = ""
    origin_note: str = ""

    def __post_init__(self) -> None:
        if not self.seed_id:
            raise ValueError("seed_id must be non-empty")
        if not len(self.quote):
            raise ValueError(f"seed {self.seed_id!r}: quote must be non-empty")


def load_seeds(path: str | Path) -> list[SeedEntry]:
    """Read an NDJSON seed file; strict, because seeds are configuration.

    Records carry {seed_id, quote:[string], origin_title, origin_note}.
    Malformed records and duplicate ids raise ConfigurationError rather
    than being skipped.
    """
    entries: list[SeedEntry] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                entry = SeedEntry(
                    seed_id=rec["seed_id"],
                    quote=TokenSeq.from_tokens(rec["quote"]),
                    origin_title=rec["origin_title"],
                    origin_note=rec["origin_note"],
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigurationError(
                    f"{path}:{lineno}: bad seed record: {exc}"
                ) from exc
            if entry.seed_id in seen:
                raise ConfigurationError(
                    f"{path}:{lineno}: duplicate seed_id {entry.seed_id!r}"
                )
            seen.add(entry.seed_id)
            entries.append(entry)
    if not entries:
        raise ConfigurationError(f"{path}: seed file contains no seeds")
    return entries


def save_seeds(entries: Sequence[SeedEntry], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in entries:
            rec = {
                "seed_id": e.seed_id,
                "quote": list(e.quote.tokens),
                "origin_title": e.origin_title,
                "origin_note": e.origin_note,
            }
            fh.write(json.dumps(rec) + "\n")


@dataclass(frozen=True)
class Annotation:
    """A detected reference, as character offsets into the submitted text."""

    char_start: int
    char_end: int
    seed_id: str
    score: float
    matched_text: str

    def __post_init__(self) -> None:
        if not 0 <= self.char_start < self.char_end:
            raise ValueError(
                f"bad span ({self.char_start}, {self.char_end}): "
                "need 0 <= start < end"
            )


def annotation_to_wire(a: Annotation) -> dict:
    """JSON-safe dict; the +inf verbatim-match sentinel becomes null."""
    return {
        "char_start": a.char_start,
        "char_end": a.char_end,
        "seed_id": a.seed_id,
        "score": None if math.isinf(a.score) else a.score,
        "matched_text": a.matched_text,
    }


# A candidate is a maximal terminator-free stretch of text, so text without
# any terminator is itself one candidate.
_FRAGMENT = re.compile(r"[^.!?\n]+")


def extract_candidates(text: str) -> list[TokenSeq]:
    """Candidate sentences with source spans into ``text``.

    Splits on sentence terminators (. ! ? and newlines) and keeps fragments
    of 3..60 tokens.
    """
    out: list[TokenSeq] = []
    for frag in _FRAGMENT.finditer(text):
        seq = tokenize(frag.group())
        if not MIN_CANDIDATE_TOKENS <= len(seq) <= MAX_CANDIDATE_TOKENS:
            continue
        lo, hi = seq.source_span
        out.append(TokenSeq(seq.tokens, (frag.start() + lo, frag.start() + hi)))
    return out


def scan(
    text: str,
    seeds: Sequence[SeedEntry],
    ix: LshIndex,
    d: DetectorModel,
    m: TaggerModel,
    idf: IdfTable,
    jaccard_threshold: float = 0.2,
) -> list[Annotation]:
    """Annotate every candidate sentence that references a seed quote.

    Per candidate the index proposes seeds cheaply; survivors of the
    estimated-Jaccard post-filter go to the detector.  When several seeds
    fire on one span the highest-scoring one wins (smallest seed_id on
    exact score ties).  A candidate that repeats a seed verbatim is
    annotated with score +inf, ahead of any detector margin.

    Annotations come back sorted by char_start and non-overlapping, since
    candidates are disjoint fragments scanned left to right.
    """
    if ix is None or d is None or m is None or idf is None:
        raise ConfigurationError("scan requires loaded models and an index")
    if not seeds:
        raise ConfigurationError("scan requires a non-empty seed set")
    by_id = {s.seed_id: s for s in seeds}
    seed_tags: dict[str, tuple[int, ...]] = {}
    out: list[Annotation] = []
    for cand in extract_candidates(text):
        sig = minhash_signature(shingle(cand), k=ix.k, hash_seed=ix.hash_seed)
        best: Annotation | None = None
        for sid in sorted(query_signature(ix, sig)):
            seed = by_id.get(sid)
            if seed is None:
                continue
            if cand.tokens == seed.quote.tokens:
                score = math.inf
            else:
                if estimate_jaccard(sig, ix.seeds[sid][1]) < jaccard_threshold:
                    continue
                if sid not in seed_tags:
                    seed_tags[sid] = tag(m, seed.quote)
                f = features_from_tags(seed.quote, seed_tags[sid], cand, idf)
                label, score = classify_features(d, f)
                if not label:
                    continue
            if best is None or score > best.score:
                lo, hi = cand.source_span
                best = Annotation(lo, hi, sid, score, text[lo:hi])
        if best is not None:
            out.append(best)
    return out


@dataclass(frozen=True)
class ServiceConfig:
    """Tunables for serving, persisted as a versioned key=value file."""

    port: int = 8765
    max_body_bytes: int = 1_000_000
    lsh_k: int = DEFAULT_K
    lsh_bands: int = DEFAULT_BANDS
    lsh_rows: int = DEFAULT_ROWS
    hash_seed: int = 0
    jaccard_threshold: float = 0.2

    def __post_init__(self) -> None:
        if not 0 < self.port < 65536:
            raise ConfigurationError(f"port {self.port} out of range")
        if self.max_body_bytes <= 0:
            raise ConfigurationError("max_body_bytes must be positive")
        if self.lsh_bands * self.lsh_rows != self.lsh_k:
            raise ConfigurationError(
                f"lsh_bands*lsh_rows must equal lsh_k "
                f"({self.lsh_bands}*{self.lsh_rows} != {self.lsh_k})"
            )
        if not 0.0 <= self.jaccard_threshold <= 1.0:
            raise ConfigurationError("jaccard_threshold must be in [0, 1]")


_CONFIG_TYPES = {f.name: type(getattr(ServiceConfig(), f.name)) for f in fields(ServiceConfig)}


def save_config(cfg: ServiceConfig, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("snowclone-config\tv1\n")
        for name in _CONFIG_TYPES:
            fh.write(f"{name}={getattr(cfg, name)!r}\n")


def load_config(path: str | Path) -> ServiceConfig:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if header[:2] != ["snowclone-config", "v1"]:
            raise ConfigurationError(f"{path}: not a v1 service config")
        kwargs: dict[str, int | float] = {}
        for lineno, line in enumerate(fh, 2):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep or key not in _CONFIG_TYPES:
                raise ConfigurationError(f"{path}:{lineno}: unknown entry {line!r}")
            try:
                kwargs[key] = _CONFIG_TYPES[key](value.strip())
            except ValueError as exc:
                raise ConfigurationError(f"{path}:{lineno}: {exc}") from exc
    return ServiceConfig(**kwargs)


@dataclass
class ScanEngine:
    """Models, seeds, and index bundled for serving; immutable after load."""

    seeds: list[SeedEntry]
    tagger: TaggerModel
    detector: DetectorModel
    idf: IdfTable
    index: LshIndex
    config: ServiceConfig

    @classmethod
    def load(
        cls,
        model_dir: str | Path,
        seed_file: str | Path,
        config: ServiceConfig | None = None,
    ) -> "ScanEngine":
        """Load tagger.model, detector.model, and idf.tsv from model_dir
        plus the NDJSON seed file, then index the seeds."""
        cfg = config if config is not None else ServiceConfig()
        model_dir = Path(model_dir)
        missing = [
            name
            for name in (TAGGER_FILE, DETECTOR_FILE, IDF_FILE)
            if not (model_dir / name).is_file()
        ]
        if missing:
            raise ConfigurationError(
                f"{model_dir}: missing model file(s): {', '.join(missing)}"
            )
        if not Path(seed_file).is_file():
            raise ConfigurationError(f"{seed_file}: seed file not found")
        seeds = load_seeds(seed_file)
        index = build_index(
            ((s.seed_id, s.quote) for s in seeds),
            k=cfg.lsh_k,
            b=cfg.lsh_bands,
            r=cfg.lsh_rows,
            hash_seed=cfg.hash_seed,
        )
        return cls(
            seeds=seeds,
            tagger=load_tagger(model_dir / TAGGER_FILE),
            detector=load_detector(model_dir / DETECTOR_FILE),
            idf=load_idf(model_dir / IDF_FILE),
            index=index,
            config=cfg,
        )

    def annotate(self, text: str) -> list[Annotation]:
        return scan(
            text,
            self.seeds,
            self.index,
            self.detector,
            self.tagger,
            self.idf,
            jaccard_threshold=self.config.jaccard_threshold,
        )
