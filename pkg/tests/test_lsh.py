import random

import numpy as np
import pytest

from snowclone.lsh import (
    LshIndex,
    build_index,
    collision_probability,
    estimate_jaccard,
    minhash_signature,
    query,
    shingle,
)
from snowclone.text import TokenSeq

from oracles import jaccard


class TestShingle:
    def test_three_tokens(self):
        assert shingle(["a", "b", "c"]) == {"a", "b", "c", "a_b", "b_c"}

    def test_single_token(self):
        assert shingle(["tok"]) == {"tok"}

    def test_permutation_shares_only_unigrams(self):
        common = shingle(["a", "b"]) & shingle(["b", "a"])
        assert common == {"a", "b"}

    def test_accepts_token_seq(self):
        s = TokenSeq.from_tokens(["x", "y"])
        assert shingle(s) == {"x", "y", "x_y"}


def sets_with_jaccard_half(rng: random.Random, tag: str):
    """Two shingle sets with exact Jaccard 0.5: 20 shared, 10 own each."""
    shared = {f"{tag}s{i}" for i in range(20)}
    a = shared | {f"{tag}a{i}" for i in range(10)}
    b = shared | {f"{tag}b{i}" for i in range(10)}
    return a, b


class TestMinHash:
    def test_identical_sets_identical_signatures(self):
        sh = shingle(["one", "does", "not", "simply"])
        s1 = minhash_signature(sh, k=128, hash_seed=0)
        s2 = minhash_signature(sh, k=128, hash_seed=0)
        assert np.array_equal(s1.values, s2.values)
        assert estimate_jaccard(s1, s2) == 1.0

    def test_empty_set_rejected(self):
        with pytest.raises(ValueError):
            minhash_signature(set())

    def test_signature_length(self):
        sig = minhash_signature({"a", "b"}, k=32)
        assert sig.values.shape == (32,)
        assert sig.k == 32

    def test_disjoint_sets_estimate_near_zero(self):
        for trial in range(20):
            a = {f"x{trial}_{i}" for i in range(30)}
            b = {f"y{trial}_{i}" for i in range(30)}
            assert jaccard(a, b) == 0.0
            est = estimate_jaccard(
                minhash_signature(a, k=256), minhash_signature(b, k=256)
            )
            assert est <= 0.05

    def test_jaccard_half_estimates(self):
        rng = random.Random(61)
        estimates = []
        for trial in range(100):
            a, b = sets_with_jaccard_half(rng, f"t{trial}")
            assert jaccard(a, b) == 0.5
            estimates.append(
                estimate_jaccard(
                    minhash_signature(a, k=256), minhash_signature(b, k=256)
                )
            )
        assert abs(float(np.mean(estimates)) - 0.5) <= 0.1

    def test_position_agreement_tracks_true_jaccard(self):
        # Empirical agreement within 3 binomial sigmas of the exact value.
        rng = random.Random(67)
        k = 256
        for trial in range(10):
            n_shared = rng.randint(5, 30)
            n_a = rng.randint(1, 15)
            n_b = rng.randint(1, 15)
            shared = {f"c{trial}_{i}" for i in range(n_shared)}
            a = shared | {f"a{trial}_{i}" for i in range(n_a)}
            b = shared | {f"b{trial}_{i}" for i in range(n_b)}
            true_j = jaccard(a, b)
            est = estimate_jaccard(
                minhash_signature(a, k=k), minhash_signature(b, k=k)
            )
            spread = 3 * (true_j * (1 - true_j) / k) ** 0.5
            assert abs(est - true_j) <= max(spread, 1 / k)

    def test_estimate_symmetric_and_bounded(self):
        rng = random.Random(71)
        for trial in range(20):
            a = {f"a{trial}_{i}" for i in range(rng.randint(1, 20))}
            b = {f"b{trial}_{i}" for i in range(rng.randint(1, 20))} | set(
                list(a)[:5]
            )
            sa, sb = minhash_signature(a), minhash_signature(b)
            assert estimate_jaccard(sa, sb) == estimate_jaccard(sb, sa)
            assert 0.0 <= estimate_jaccard(sa, sb) <= 1.0

    def test_parameter_mismatch_rejected(self):
        a = minhash_signature({"x"}, k=64)
        b = minhash_signature({"x"}, k=128)
        with pytest.raises(ValueError):
            estimate_jaccard(a, b)
        c = minhash_signature({"x"}, k=64, hash_seed=9)
        with pytest.raises(ValueError):
            estimate_jaccard(a, c)


def make_seed(rng: random.Random, n: int = 10) -> TokenSeq:
    return TokenSeq.from_tokens([f"w{rng.randint(0, 400)}" for _ in range(n)])


class TestIndex:
    def test_band_parameter_validation(self):
        with pytest.raises(ValueError):
            build_index([("s", TokenSeq.from_tokens(["a"]))], k=128, b=60, r=2)

    def test_query_own_sentence(self):
        rng = random.Random(73)
        seeds = [(f"s{i}", make_seed(rng)) for i in range(30)]
        ix = build_index(seeds)
        for sid, seq in seeds:
            assert sid in query(ix, seq)

    def test_every_seed_in_exactly_b_band_buckets(self):
        rng = random.Random(79)
        seeds = [(f"s{i}", make_seed(rng)) for i in range(10)]
        ix = build_index(seeds)
        counts = {sid: 0 for sid, _ in seeds}
        for members in ix.buckets.values():
            for sid in members:
                counts[sid] += 1
        assert all(c == ix.bands for c in counts.values())

    def test_unrelated_query_returns_nothing(self):
        rng = random.Random(83)
        seeds = [(f"s{i}", make_seed(rng)) for i in range(30)]
        ix = build_index(seeds)
        for i in range(50):
            probe = TokenSeq.from_tokens([f"z{i}_{j}" for j in range(8)])
            assert query(ix, probe) == set()

    def test_empty_query(self):
        ix = build_index([("s", TokenSeq.from_tokens(["a", "b"]))])
        assert query(ix, TokenSeq.from_tokens([])) == set()

    def test_high_jaccard_recall(self):
        # 200 seed/variant pairs with shingle Jaccard >= 0.5; the S-curve
        # at J=0.5 (b=64, r=2) is 1-(0.75)^64 ~ 1-1e-8, so recall should
        # comfortably clear 0.95.
        rng = random.Random(89)
        assert collision_probability(0.5) >= 0.95
        seeds, probes = [], []
        made = 0
        while made < 200:
            base = [f"w{rng.randint(0, 2000)}" for _ in range(12)]
            variant = list(base)
            for _ in range(rng.randint(1, 2)):
                variant[rng.randrange(12)] = f"v{rng.randint(0, 2000)}"
            if jaccard(shingle(base), shingle(variant)) < 0.5:
                continue
            sid = f"s{made}"
            seeds.append((sid, TokenSeq.from_tokens(base)))
            probes.append((sid, TokenSeq.from_tokens(variant)))
            made += 1
        ix = build_index(seeds)
        hits = sum(1 for sid, probe in probes if sid in query(ix, probe))
        assert hits / len(probes) >= 0.95

    def test_deterministic_given_hash_seed(self):
        rng = random.Random(97)
        seeds = [(f"s{i}", make_seed(rng)) for i in range(15)]
        ix1 = build_index(seeds, hash_seed=5)
        ix2 = build_index(seeds, hash_seed=5)
        assert set(ix1.buckets) == set(ix2.buckets)
        probe = seeds[0][1]
        assert query(ix1, probe) == query(ix2, probe)
