"""KEEP/WILD sequence tagger: averaged structured perceptron.

Given a sentence, predict for every token whether a snowclone template
would replace it with a wildcard.  The model is a linear chain over two
tags with first-order transition weights, trained with the averaged
perceptron and decoded by Viterbi.  Ties break toward KEEP (the majority
class); a non-negative WILD bias, tuned on dev data, trades precision
for recall at decode time.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

from .pattern import KEEP, WILD
from .text import IdfTable, TokenSeq, build_idf_from_token_seqs

STOPWORDS = frozenset(
    """a an the is are was were be been am do does did not no of in on at to
    for with by from as and or but if then than that this these those it its
    he she his her hers they them their we us our you your i my me mine so
    such there here when where who whom what which why how all any can will
    would should could may might must have has had""".split()
)

#: Feature families token_features can emit; TaggerModel.feature_config
#: selects a subset.
ALL_FAMILIES = ("tok", "prev", "next", "pos", "idfq", "stop", "len")

_TAG_CHAR = {KEEP: "K", WILD: "W"}


@dataclass(frozen=True)
class TaggedExample:
    """A sentence with gold tags and the id of its underlying pattern."""

    sentence: TokenSeq
    gold: tuple[int, ...]
    group_id: str

    def __post_init__(self):
        if not len(self.sentence):
            raise ValueError("empty sentence")
        if len(self.gold) != len(self.sentence):
            raise ValueError("gold tags do not match sentence length")
        if any(t not in (KEEP, WILD) for t in self.gold):
            raise ValueError("tags must be 0 (KEEP) or 1 (WILD)")
        if not self.group_id:
            raise ValueError("group_id must be non-empty")


def _len_bucket(tok: str) -> str:
    n = len(tok)
    if n <= 2:
        return "1-2"
    if n <= 4:
        return "3-4"
    if n <= 7:
        return "5-7"
    return "8+"


def token_features(
    s: TokenSeq | Sequence[str],
    i: int,
    idf: IdfTable,
    families: Sequence[str] = ALL_FAMILIES,
) -> list[str]:
    """Sparse emission features for token i of s."""
    toks = tuple(s)
    tok = toks[i]
    feats: list[str] = []
    fam = set(families)
    if "tok" in fam:
        feats.append(f"tok={tok}")
    if "prev" in fam:
        feats.append(f"prev={toks[i - 1] if i > 0 else '<s>'}")
    if "next" in fam:
        feats.append(f"next={toks[i + 1] if i < len(toks) - 1 else '</s>'}")
    if "pos" in fam:
        if i == 0:
            feats.append("pos=first")
        if i == len(toks) - 1:
            feats.append("pos=last")
        if 0 < i < len(toks) - 1:
            feats.append("pos=middle")
    if "idfq" in fam:
        feats.append(f"idfq={idf.idf_quartile(tok)}")
    if "stop" in fam and tok in STOPWORDS:
        feats.append("stop=1")
    if "len" in fam:
        feats.append(f"len={_len_bucket(tok)}")
    return feats


@dataclass
class TaggerModel:
    """Linear chain tagger: feature weights plus the idf table they rely on.

    Weight keys are emission features conjoined with a tag ("tok=one|K")
    and transition features ("trans:^>K", "trans:K>W"); "^" is the start
    state.  ``wild_bias`` is added to every WILD emission score at decode
    time and does not live in ``weights``.
    """

    weights: dict[str, float]
    idf: IdfTable
    feature_config: tuple[str, ...] = ALL_FAMILIES
    train_seed: int = 0
    wild_bias: float = 0.0


def _features_per_token(m_config, idf, sentence) -> list[list[str]]:
    return [token_features(sentence, i, idf, m_config) for i in range(len(sentence))]


def _decode(weights: dict, feat_seq: list, wild_bias: float) -> tuple[int, ...]:
    """Viterbi over the 2-tag chain; every tie breaks toward KEEP."""
    n = len(feat_seq)
    emit = []
    for feats in feat_seq:
        e_k = sum(weights.get(f + "|K", 0.0) for f in feats)
        e_w = sum(weights.get(f + "|W", 0.0) for f in feats) + wild_bias
        emit.append((e_k, e_w))
    tr = {
        (p, t): weights.get(f"trans:{p}>{t}", 0.0) for p in "^KW" for t in "KW"
    }
    score = {"K": tr["^", "K"] + emit[0][0], "W": tr["^", "W"] + emit[0][1]}
    back: list[dict] = []
    for i in range(1, n):
        step: dict = {}
        nxt: dict = {}
        for t, e in zip("KW", emit[i]):
            via_k = score["K"] + tr["K", t]
            via_w = score["W"] + tr["W", t]
            if via_w > via_k:
                nxt[t], step[t] = via_w + e, "W"
            else:
                nxt[t], step[t] = via_k + e, "K"
        score = nxt
        back.append(step)
    last = "W" if score["W"] > score["K"] else "K"
    chars = [last]
    for step in reversed(back):
        last = step[last]
        chars.append(last)
    chars.reverse()
    return tuple(KEEP if c == "K" else WILD for c in chars)


def _path_features(feat_seq: list, tags: Sequence[int]) -> dict[str, int]:
    counts: dict[str, int] = {}
    prev = "^"
    for feats, tag in zip(feat_seq, tags):
        c = _TAG_CHAR[tag]
        for f in feats:
            key = f + "|" + c
            counts[key] = counts.get(key, 0) + 1
        key = f"trans:{prev}>{c}"
        counts[key] = counts.get(key, 0) + 1
        prev = c
    return counts


def tag(m: TaggerModel, s: TokenSeq | Sequence[str]) -> tuple[int, ...]:
    """Predict KEEP/WILD for each token of s."""
    if not len(s):
        raise ValueError("cannot tag an empty sentence")
    feat_seq = _features_per_token(m.feature_config, m.idf, s)
    return _decode(m.weights, feat_seq, m.wild_bias)


def train_tagger(
    train: Sequence[TaggedExample],
    epochs: int = 10,
    train_seed: int = 0,
    feature_config: tuple[str, ...] = ALL_FAMILIES,
    idf: Optional[IdfTable] = None,
) -> TaggerModel:
    """Averaged-perceptron training over the 2-tag chain.

    The idf table backing the idf-quartile features is built from the
    training sentences unless one is supplied.  Deterministic given the
    data order and seed; epochs=0 yields all-zero weights, which decode
    to all-KEEP.
    """
    if not train:
        raise ValueError("empty training set")
    if idf is None:
        idf = build_idf_from_token_seqs([ex.sentence for ex in train])
    feat_seqs = [
        _features_per_token(feature_config, idf, ex.sentence) for ex in train
    ]

    w: dict[str, float] = {}
    acc: dict[str, float] = {}  # c-weighted updates, for averaging
    c = 1
    rng = random.Random(train_seed)
    order = list(range(len(train)))
    for _ in range(epochs):
        rng.shuffle(order)
        for i in order:
            pred = _decode(w, feat_seqs[i], 0.0)
            gold = train[i].gold
            if pred != gold:
                delta = _path_features(feat_seqs[i], gold)
                for key, n in _path_features(feat_seqs[i], pred).items():
                    delta[key] = delta.get(key, 0) - n
                for key, d in delta.items():
                    if d:
                        w[key] = w.get(key, 0.0) + d
                        acc[key] = acc.get(key, 0.0) + c * d
            c += 1

    averaged = {k: v - acc.get(k, 0.0) / c for k, v in w.items()}
    averaged = {k: v for k, v in averaged.items() if v != 0.0}
    return TaggerModel(
        weights=averaged,
        idf=idf,
        feature_config=tuple(feature_config),
        train_seed=train_seed,
    )


@dataclass(frozen=True)
class TagMetrics:
    accuracy: float
    wild_recall: float
    wild_precision: float


def _metrics(tp: int, fp: int, fn: int, correct: int, total: int) -> TagMetrics:
    # Vacuous precision is 1 (nothing predicted WILD, nothing wrong);
    # vacuous recall is 0, so the all-KEEP baseline scores recall 0
    # on any dataset.
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return TagMetrics(correct / total, recall, precision)


def eval_tagger(m: TaggerModel, test: Sequence[TaggedExample]) -> TagMetrics:
    """Token-micro accuracy plus recall/precision on the WILD class."""
    if not test:
        raise ValueError("empty test set")
    tp = fp = fn = correct = total = 0
    for ex in test:
        pred = tag(m, ex.sentence)
        for p, g in zip(pred, ex.gold):
            total += 1
            correct += p == g
            tp += p == WILD and g == WILD
            fp += p == WILD and g == KEEP
            fn += p == KEEP and g == WILD
    return _metrics(tp, fp, fn, correct, total)


def naive_baseline(test: Sequence[TaggedExample]) -> TagMetrics:
    """Metrics of the constant all-KEEP predictor."""
    if not test:
        raise ValueError("empty test set")
    total = sum(len(ex.gold) for ex in test)
    wild = sum(t == WILD for ex in test for t in ex.gold)
    return _metrics(0, 0, wild, total - wild, total)


_BIAS_GRID = (0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0)


def tune_wild_bias(
    m: TaggerModel,
    dev: Sequence[TaggedExample],
    candidates: Sequence[float] = _BIAS_GRID,
) -> TaggerModel:
    """Pick the WILD bias maximizing WILD F1 on dev; ties go to the
    smaller bias (pay precision for recall only when dev shows a gain)."""
    if not dev:
        raise ValueError("empty dev set")
    best_bias, best_f1 = m.wild_bias, -1.0
    for bias in candidates:
        met = eval_tagger(replace(m, wild_bias=bias), dev)
        denom = met.wild_precision + met.wild_recall
        f1 = 2 * met.wild_precision * met.wild_recall / denom if denom else 0.0
        if f1 > best_f1:
            best_bias, best_f1 = bias, f1
    return replace(m, wild_bias=best_bias)


def save_tagger(m: TaggerModel, path: str | Path) -> None:
    """Versioned text format: header, then df: and w: lines (TAB separated)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            "snowclone-tagger\tv1"
            f"\tfeatures={','.join(m.feature_config)}"
            f"\ttrain_seed={m.train_seed}"
            f"\twild_bias={m.wild_bias!r}"
            f"\tdoc_count={m.idf.doc_count}\n"
        )
        for tok in sorted(m.idf.df):
            fh.write(f"df:{tok}\t{m.idf.df[tok]}\n")
        for key in sorted(m.weights):
            fh.write(f"w:{key}\t{m.weights[key]!r}\n")


def load_tagger(path: str | Path) -> TaggerModel:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if header[:2] != ["snowclone-tagger", "v1"]:
            raise ValueError(f"{path}: not a v1 tagger model")
        meta = dict(part.split("=", 1) for part in header[2:])
        df: dict[str, int] = {}
        weights: dict[str, float] = {}
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            key, _, val = line.partition("\t")
            if key.startswith("df:"):
                df[key[3:]] = int(val)
            elif key.startswith("w:"):
                weights[key[2:]] = float(val)
            else:
                raise ValueError(f"{path}: unrecognized line {key!r}")
    doc_count = int(meta["doc_count"])
    idf = IdfTable(
        doc_count=doc_count, df=df, default_idf=math.log(doc_count + 1) + 1.0
    )
    return TaggerModel(
        weights=weights,
        idf=idf,
        feature_config=tuple(meta["features"].split(",")),
        train_seed=int(meta["train_seed"]),
        wild_bias=float(meta["wild_bias"]),
    )
