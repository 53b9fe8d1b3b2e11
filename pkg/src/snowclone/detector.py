"""Reference detector: does a candidate sentence reference a seed quote?

Ten structural features in three groups (plain similarity seed vs
candidate, wildcard-aware similarity against the tagged snowclone form,
idf statistics of shared and seed-only words) are expanded to every
monomial of degree <= 3 and fed to an L2-regularized hinge-loss linear
classifier.  The expansion carries square-root multinomial coefficients,
so the dot product of two expanded vectors equals (1 + f·f')^3 exactly:
the primal model spans the same hypothesis space as a degree-3
polynomial-kernel SVM with these features.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from pathlib import Path
from typing import Sequence

import numpy as np

from .pattern import WILD
from .tagger import TaggerModel, tag
from .text import (
    IdfTable,
    TokenSeq,
    edit_distance,
    idf_stats,
    lcs_length,
    longest_common_substring,
)

EXPANSION_DEGREE = 3
REG_C = 0.5
N_BASE_FEATURES = 10
EXPANDED_DIM = 286  # C(13, 3): monomials of degree <= 3 in 10 variables


@dataclass(frozen=True)
class ReferencePair:
    """A labeled (seed, candidate) pair; label 1 means reference."""

    seed: TokenSeq
    candidate: TokenSeq
    label: int
    seed_id: str

    def __post_init__(self):
        if not len(self.seed) or not len(self.candidate):
            raise ValueError("seed and candidate must be non-empty")
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")
        if not self.seed_id:
            raise ValueError("seed_id must be non-empty")


@dataclass(frozen=True)
class DetectorFeatures:
    """The ten base features; g1/g2 live in [0,1], g3 are idf reals.

    ``degenerate_tags`` flags an all-WILD tagging, in which case the g2
    values fall back to g1; it is not part of the feature vector.
    """

    g1_edit: float
    g1_lcs: float
    g1_substr: float
    g2_edit: float
    g2_lcs: float
    g2_substr: float
    g3_mean_shared: float
    g3_max_shared: float
    g3_mean_sonly: float
    g3_max_sonly: float
    degenerate_tags: bool = False

    def vector(self) -> np.ndarray:
        return np.array(
            [
                self.g1_edit,
                self.g1_lcs,
                self.g1_substr,
                self.g2_edit,
                self.g2_lcs,
                self.g2_substr,
                self.g3_mean_shared,
                self.g3_max_shared,
                self.g3_mean_sonly,
                self.g3_max_sonly,
            ],
            dtype=np.float64,
        )


def _wild_edit(s: Sequence[str], tags: Sequence[int], c: Sequence[str]) -> int:
    """Edit distance where a WILD seed position substitutes for free."""
    n, m = len(s), len(c)
    prev = list(range(m + 1))
    for i in range(1, n + 1):
        cur = [i] + [0] * m
        wild = tags[i - 1] == WILD
        tok = s[i - 1]
        for j in range(1, m + 1):
            sub = prev[j - 1] + (0 if wild or tok == c[j - 1] else 1)
            cur[j] = min(sub, prev[j] + 1, cur[j - 1] + 1)
        prev = cur
    return prev[m]


def _wild_lcs(s: Sequence[str], tags: Sequence[int], c: Sequence[str]) -> int:
    """LCS length where a WILD seed position matches any token."""
    m = len(c)
    prev = [0] * (m + 1)
    for i, tok in enumerate(s):
        wild = tags[i] == WILD
        cur = [0] * (m + 1)
        for j in range(1, m + 1):
            if wild or tok == c[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = max(prev[j], cur[j - 1])
        prev = cur
    return prev[m]


def _wild_substr(s: Sequence[str], tags: Sequence[int], c: Sequence[str]) -> int:
    """Longest contiguous run where WILD positions match any token."""
    m = len(c)
    best = 0
    prev = [0] * (m + 1)
    for i, tok in enumerate(s):
        wild = tags[i] == WILD
        cur = [0] * (m + 1)
        for j in range(1, m + 1):
            if wild or tok == c[j - 1]:
                cur[j] = prev[j - 1] + 1
                if cur[j] > best:
                    best = cur[j]
        prev = cur
    return best


def features_from_tags(
    s: TokenSeq | Sequence[str],
    tags: Sequence[int],
    c: TokenSeq | Sequence[str],
    idf: IdfTable,
) -> DetectorFeatures:
    """Feature extraction given an already-computed seed tagging.

    The tags are used unmerged, one per seed token, so the wildcard-aware
    metrics stay length-aligned with the plain ones.
    """
    s_toks, c_toks = tuple(s), tuple(c)
    if not s_toks or not c_toks:
        raise ValueError("seed and candidate must be non-empty")
    if len(tags) != len(s_toks):
        raise ValueError("tags do not match seed length")
    longer = max(len(s_toks), len(c_toks))
    shorter = min(len(s_toks), len(c_toks))
    g1_edit = edit_distance(s_toks, c_toks) / longer
    g1_lcs = lcs_length(s_toks, c_toks) / shorter
    g1_substr = longest_common_substring(s_toks, c_toks) / shorter
    degenerate = all(t == WILD for t in tags)
    if degenerate:
        g2_edit, g2_lcs, g2_substr = g1_edit, g1_lcs, g1_substr
    else:
        g2_edit = _wild_edit(s_toks, tags, c_toks) / longer
        g2_lcs = _wild_lcs(s_toks, tags, c_toks) / shorter
        g2_substr = _wild_substr(s_toks, tags, c_toks) / shorter
    mean_sh, max_sh, mean_so, max_so = idf_stats(s_toks, c_toks, idf)
    return DetectorFeatures(
        g1_edit,
        g1_lcs,
        g1_substr,
        g2_edit,
        g2_lcs,
        g2_substr,
        mean_sh,
        max_sh,
        mean_so,
        max_so,
        degenerate_tags=degenerate,
    )


def extract_features(
    s: TokenSeq, c: TokenSeq, m: TaggerModel, idf: IdfTable
) -> DetectorFeatures:
    """Tag the seed with m, then compute the ten base features."""
    return features_from_tags(s, tag(m, s), c, idf)


def _expansion_terms() -> tuple[np.ndarray, np.ndarray]:
    """Monomial index triples over (1, f1..f10) and sqrt-multinomial coefs."""
    idx = []
    coefs = []
    for triple in combinations_with_replacement(range(N_BASE_FEATURES + 1), 3):
        idx.append(triple)
        mults: dict[int, int] = {}
        for i in triple:
            mults[i] = mults.get(i, 0) + 1
        coef = math.factorial(3)
        for v in mults.values():
            coef //= math.factorial(v)
        coefs.append(math.sqrt(coef))
    return np.array(idx, dtype=np.intp), np.array(coefs, dtype=np.float64)


_EXP_IDX, _EXP_COEF = _expansion_terms()
assert len(_EXP_COEF) == EXPANDED_DIM


def poly_expand(f: DetectorFeatures | np.ndarray) -> np.ndarray:
    """Explicit degree-3 expansion; phi(a)·phi(b) == (1 + a·b)^3."""
    base = f.vector() if isinstance(f, DetectorFeatures) else np.asarray(f, dtype=np.float64)
    aug = np.concatenate(([1.0], base))
    return _EXP_COEF * aug[_EXP_IDX].prod(axis=1)


@dataclass
class DetectorModel:
    """Linear model over the expanded, standardized feature space."""

    weights: np.ndarray
    bias: float
    threshold: float
    mean: np.ndarray
    scale: np.ndarray
    expansion_degree: int = EXPANSION_DEGREE
    reg_c: float = REG_C
    train_seed: int = 0
    objective_log: tuple[float, ...] = field(default=(), repr=False, compare=False)


def _expanded_matrix(
    pairs: Sequence[ReferencePair], m: TaggerModel, idf: IdfTable
) -> np.ndarray:
    tag_cache: dict[tuple, tuple] = {}
    rows = []
    for p in pairs:
        key = tuple(p.seed)
        if key not in tag_cache:
            tag_cache[key] = tag(m, p.seed)
        feats = features_from_tags(p.seed, tag_cache[key], p.candidate, idf)
        rows.append(poly_expand(feats))
    return np.array(rows)


def _score_matrix(d: DetectorModel, X: np.ndarray) -> np.ndarray:
    return ((X - d.mean) / d.scale) @ d.weights + d.bias


def _best_f1_threshold(scores: np.ndarray, y01: np.ndarray) -> float:
    """Scan candidate cutoffs, maximize F1; ties go to the smallest cutoff
    (recall first).

    Candidates are midpoints between consecutive distinct scores plus one
    below and one above everything, so a separable score distribution gets
    a cutoff centered in the gap rather than hugging the positive cloud.
    """
    uniq = np.unique(scores)
    candidates = [float(uniq[0]) - 1.0]
    candidates += [float(a + b) / 2.0 for a, b in zip(uniq, uniq[1:])]
    candidates.append(float(uniq[-1]) + 1.0)
    best_t, best_f1 = candidates[-1], -1.0
    for t in candidates:
        pred = scores >= t
        tp = int(np.sum(pred & (y01 == 1)))
        fp = int(np.sum(pred & (y01 == 0)))
        fn = int(np.sum(~pred & (y01 == 1)))
        f1 = 2 * tp / (2 * tp + fp + fn) if 2 * tp + fp + fn else 0.0
        if f1 > best_f1:
            best_t, best_f1 = t, f1
    return best_t


def train_detector(
    train: Sequence[ReferencePair],
    m: TaggerModel,
    idf: IdfTable,
    train_seed: int = 0,
    iterations: int = 300,
    learning_rate: float = 0.5,
) -> DetectorModel:
    """Full-batch subgradient descent on the SVM objective.

    Minimizes lambda*||w||^2 + mean hinge loss with lambda = 1/(2*C*n),
    C = 0.5, over standardized expanded features.  The returned weights
    are the best iterate seen, so the logged objective is non-increasing.
    The decision threshold is then chosen to maximize F1 on the training
    pairs.
    """
    if not train:
        raise ValueError("empty training set")
    labels = {p.label for p in train}
    if labels != {0, 1}:
        raise ValueError("training data must contain both classes")

    X = _expanded_matrix(train, m, idf)
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    scale = np.where(std > 0, std, 1.0)
    Xs = (X - mean) / scale
    y = np.array([1.0 if p.label else -1.0 for p in train])
    n = len(train)
    lam = 1.0 / (2.0 * REG_C * n)

    w = np.zeros(X.shape[1])
    b = 0.0
    best = (math.inf, w, b)
    log = []
    for t in range(iterations):
        margins = y * (Xs @ w + b)
        hinge = np.maximum(0.0, 1.0 - margins)
        objective = lam * float(w @ w) + float(hinge.mean())
        if objective < best[0]:
            best = (objective, w.copy(), b)
        log.append(best[0])

        active = hinge > 0
        grad_w = 2.0 * lam * w - (y[active] @ Xs[active]) / n
        grad_b = -float(y[active].sum()) / n
        eta = learning_rate / (1.0 + t / 50.0)
        w = w - eta * grad_w
        b = b - eta * grad_b

    _, w, b = best
    model = DetectorModel(
        weights=w,
        bias=b,
        threshold=0.0,
        mean=mean,
        scale=scale,
        train_seed=train_seed,
        objective_log=tuple(log),
    )
    scores = _score_matrix(model, X)
    model.threshold = _best_f1_threshold(scores, np.array([p.label for p in train]))
    return model


def classify_features(d: DetectorModel, f: DetectorFeatures) -> tuple[int, float]:
    """Label (1 = reference) and margin score for precomputed features."""
    x = (poly_expand(f) - d.mean) / d.scale
    score = float(x @ d.weights + d.bias)
    return int(score >= d.threshold), score


def classify(
    d: DetectorModel, s: TokenSeq, c: TokenSeq, m: TaggerModel, idf: IdfTable
) -> tuple[int, float]:
    """Decide whether c references s."""
    return classify_features(d, extract_features(s, c, m, idf))


@dataclass(frozen=True)
class BinaryMetrics:
    accuracy: float
    precision: float
    recall: float


def binary_metrics(y_true: Sequence[int], y_pred: Sequence[int]) -> BinaryMetrics:
    """Accuracy/precision/recall; an empty positive-prediction set scores
    precision 1.0 (nothing claimed, nothing wrong)."""
    if not len(y_true) or len(y_true) != len(y_pred):
        raise ValueError("need equal-length non-empty label sequences")
    tp = sum(1 for t, p in zip(y_true, y_pred) if t == 1 and p == 1)
    fp = sum(1 for t, p in zip(y_true, y_pred) if t == 0 and p == 1)
    fn = sum(1 for t, p in zip(y_true, y_pred) if t == 1 and p == 0)
    correct = sum(1 for t, p in zip(y_true, y_pred) if t == p)
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return BinaryMetrics(correct / len(y_true), precision, recall)


def eval_detector(
    d: DetectorModel,
    test: Sequence[ReferencePair],
    m: TaggerModel,
    idf: IdfTable,
) -> BinaryMetrics:
    if not test:
        raise ValueError("empty test set")
    X = _expanded_matrix(test, m, idf)
    pred = (_score_matrix(d, X) >= d.threshold).astype(int)
    return binary_metrics([p.label for p in test], list(pred))


def majority_metrics(test: Sequence[ReferencePair]) -> BinaryMetrics:
    """The all-negative baseline (the paper's Naive row)."""
    if not test:
        raise ValueError("empty test set")
    return binary_metrics([p.label for p in test], [0] * len(test))


def cross_validate_detector(
    pairs: Sequence[ReferencePair],
    m: TaggerModel,
    idf: IdfTable,
    n_repeats: int = 20,
    test_fraction: float = 0.2,
    seed: int = 0,
) -> tuple[float, float]:
    """Mean and std of test accuracy over repeated group-respecting splits.

    Each repeat assigns whole seed_id groups to an ~(1-test_fraction)/
    test_fraction train/test split with a different shuffle.
    """
    from .datasets import SplitSpec, group_split

    accs = []
    for rep in range(n_repeats):
        spec = SplitSpec(
            train=1.0 - test_fraction, dev=0.0, test=test_fraction,
            split_seed=seed + rep,
        )
        tr, _, te = group_split(pairs, lambda p: p.seed_id, spec)
        model = train_detector(tr, m, idf, train_seed=seed + rep)
        accs.append(eval_detector(model, te, m, idf).accuracy)
    arr = np.array(accs)
    return float(arr.mean()), float(arr.std())


def save_detector(d: DetectorModel, path: str | Path) -> None:
    """Versioned text format; repr() floats round-trip bit-exactly."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            "snowclone-detector\tv1"
            f"\texpansion_degree={d.expansion_degree}"
            f"\treg_c={d.reg_c!r}"
            f"\ttrain_seed={d.train_seed}"
            f"\tbias={d.bias!r}"
            f"\tthreshold={d.threshold!r}\n"
        )
        for i, v in enumerate(d.mean):
            fh.write(f"mean:{i}\t{float(v)!r}\n")
        for i, v in enumerate(d.scale):
            fh.write(f"scale:{i}\t{float(v)!r}\n")
        for i, v in enumerate(d.weights):
            fh.write(f"w:{i}\t{float(v)!r}\n")


def load_detector(path: str | Path) -> DetectorModel:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if header[:2] != ["snowclone-detector", "v1"]:
            raise ValueError(f"{path}: not a v1 detector model")
        meta = dict(part.split("=", 1) for part in header[2:])
        arrays: dict[str, dict[int, float]] = {"mean": {}, "scale": {}, "w": {}}
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            key, _, val = line.partition("\t")
            name, _, idx = key.partition(":")
            if name not in arrays:
                raise ValueError(f"{path}: unrecognized line {key!r}")
            arrays[name][int(idx)] = float(val)

    def to_vec(d: dict[int, float]) -> np.ndarray:
        return np.array([d[i] for i in range(len(d))])

    return DetectorModel(
        weights=to_vec(arrays["w"]),
        bias=float(meta["bias"]),
        threshold=float(meta["threshold"]),
        mean=to_vec(arrays["mean"]),
        scale=to_vec(arrays["scale"]),
        expansion_degree=int(meta["expansion_degree"]),
        reg_c=float(meta["reg_c"]),
        train_seed=int(meta["train_seed"]),
    )
