import math
import random

import pytest

from snowclone.text import (
    IdfTable,
    TokenSeq,
    build_idf,
    edit_distance,
    idf_stats,
    lcs_length,
    load_idf,
    longest_common_substring,
    save_idf,
    tokenize,
)

from oracles import edit_oracle, lcs_oracle, substring_oracle


def rand_seq(rng, max_len=8, vocab=("a", "b", "c", "d", "e", "f")):
    return [rng.choice(vocab) for _ in range(rng.randint(0, max_len))]


class TestTokenize:
    def test_seven_token_sentence(self):
        seq = tokenize("One does not simply walk into Mordor")
        assert seq.tokens == ("one", "does", "not", "simply", "walk", "into", "mordor")

    def test_empty_input(self):
        seq = tokenize("")
        assert seq.tokens == ()
        assert seq.degenerate

    def test_strips_trailing_punctuation(self):
        assert tokenize("Orange is the new black!").tokens == (
            "orange",
            "is",
            "the",
            "new",
            "black",
        )

    def test_keeps_internal_apostrophe(self):
        assert tokenize("I don't care.").tokens == ("i", "don't", "care")

    def test_strips_edge_apostrophes_and_quotes(self):
        assert tokenize("'ello \"world\"").tokens == ("ello", "world")

    def test_curly_apostrophe_normalized(self):
        assert tokenize("don’t").tokens == ("don't",)

    def test_pure_punctuation_yields_nothing(self):
        assert tokenize("... !!! --").tokens == ()

    def test_numbers_survive(self):
        assert tokenize("40 is the new 30").tokens == ("40", "is", "the", "new", "30")

    def test_source_span_covers_tokens(self):
        text = "  Hello, world!  "
        seq = tokenize(text)
        start, end = seq.source_span
        assert text[start:end] == "Hello, world"

    def test_tokens_contain_no_whitespace(self):
        seq = tokenize("a\tb\nc   d")
        assert all(not any(ch.isspace() for ch in t) for t in seq.tokens)

    def test_from_tokens_normalizes_case(self):
        assert TokenSeq.from_tokens(["One", "Does"]).tokens == ("one", "does")

    def test_from_tokens_rejects_whitespace(self):
        with pytest.raises(ValueError):
            TokenSeq.from_tokens(["a b"])


class TestEditDistance:
    def test_identity(self):
        s = tokenize("one does not simply walk")
        assert edit_distance(s, s) == 0

    def test_against_empty(self):
        assert edit_distance(["one", "does", "not"], []) == 3
        assert edit_distance([], ["one", "does", "not"]) == 3

    def test_single_substitution(self):
        a = ["one", "does", "not", "simply", "walk"]
        b = ["one", "does", "not", "simply", "dance"]
        assert edit_distance(a, b) == 1
        assert edit_oracle(a, b) == 1

    def test_matches_oracle_on_random_pairs(self):
        rng = random.Random(7)
        for _ in range(200):
            a, b = rand_seq(rng), rand_seq(rng)
            assert edit_distance(a, b) == edit_oracle(a, b)

    def test_metric_laws(self):
        rng = random.Random(8)
        for _ in range(300):
            a, b, c = rand_seq(rng, 10), rand_seq(rng, 10), rand_seq(rng, 10)
            assert edit_distance(a, a) == 0
            assert edit_distance(a, b) == edit_distance(b, a)
            assert edit_distance(a, c) <= edit_distance(a, b) + edit_distance(b, c)


class TestLcs:
    def test_identity(self):
        s = ["i", "love", "the", "smell"]
        assert lcs_length(s, s) == 4

    def test_disjoint(self):
        assert lcs_length(["a", "b"], ["x", "y"]) == 0

    def test_napalm_pancakes(self):
        a = "i love the smell of napalm in the morning".split()
        b = "i love the smell of pancakes in the morning".split()
        assert lcs_length(a, b) == 8
        assert lcs_oracle(a, b) == 8

    def test_matches_oracle_on_random_pairs(self):
        rng = random.Random(9)
        for _ in range(200):
            a, b = rand_seq(rng), rand_seq(rng)
            assert lcs_length(a, b) == lcs_oracle(a, b)


class TestLongestCommonSubstring:
    def test_identity(self):
        s = ["x", "y", "z"]
        assert longest_common_substring(s, s) == 3

    def test_forty_thirty(self):
        a = ["forty", "is", "the", "new", "thirty"]
        b = ["thirty", "is", "the", "old", "forty"]
        assert longest_common_substring(a, b) == 2

    def test_disjoint(self):
        assert longest_common_substring(["a"], ["b"]) == 0

    def test_matches_oracle_on_random_pairs(self):
        rng = random.Random(10)
        for _ in range(200):
            a, b = rand_seq(rng), rand_seq(rng)
            assert longest_common_substring(a, b) == substring_oracle(a, b)

    def test_chain_inequality(self):
        rng = random.Random(11)
        for _ in range(300):
            a, b = rand_seq(rng, 10), rand_seq(rng, 10)
            sub = longest_common_substring(a, b)
            lcs = lcs_length(a, b)
            assert sub <= lcs <= min(len(a), len(b))
            assert len(a) - lcs <= edit_distance(a, b)


class TestIdf:
    def test_token_in_every_doc_of_one_doc_corpus(self):
        table = build_idf(["hello world"])
        assert table.idf("hello") == pytest.approx(1.0)

    def test_unseen_token_99_docs(self):
        table = build_idf([f"doc{i}" for i in range(99)])
        assert table.idf("never-seen") == pytest.approx(math.log(100) + 1, abs=1e-9)
        assert table.default_idf == pytest.approx(5.60517, abs=1e-4)

    def test_df_nine_of_99(self):
        docs = ["shared common" if i < 9 else f"filler{i}" for i in range(99)]
        table = build_idf(docs)
        assert table.df["shared"] == 9
        assert table.idf("shared") == pytest.approx(math.log(10) + 1, abs=1e-9)

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            build_idf([])
        with pytest.raises(ValueError):
            build_idf(["", "   ", "..."])

    def test_monotone_in_df(self):
        docs = [" ".join(["common"] + (["rare"] if i == 0 else [])) for i in range(50)]
        table = build_idf(docs)
        assert table.df["common"] == 50
        assert table.df["rare"] == 1
        assert table.idf("rare") > table.idf("common")
        # df1 < df2 implies idf1 > idf2 for arbitrary df values too.
        synthetic = IdfTable(doc_count=100, df={}, default_idf=1.0)
        vals = [
            math.log((synthetic.doc_count + 1) / (df + 1)) + 1 for df in range(1, 101)
        ]
        assert all(x > y for x, y in zip(vals, vals[1:]))

    def test_idf_positive(self):
        table = build_idf(["a b c", "a b", "a"])
        for tok in table.df:
            assert table.idf(tok) > 0
        assert table.default_idf > 0

    def test_quartile_buckets(self):
        # Twelve tokens with distinct document frequencies 40, 37, ..., 7.
        docs = [
            " ".join(f"t{i}" for i in range(12) if d < 40 - 3 * i) for d in range(40)
        ]
        table = build_idf(docs)
        assert table.df["t0"] == 40 and table.df["t11"] == 7
        assert table.idf_quartile("t0") == 1
        assert table.idf_quartile("t11") == 4
        assert table.idf_quartile("unseen-token") == 4

    def test_save_load_round_trip(self, tmp_path):
        table = build_idf(["a b c", "a b", "b c d"])
        path = tmp_path / "idf.tsv"
        save_idf(table, path)
        loaded = load_idf(path)
        assert loaded.doc_count == table.doc_count
        assert loaded.df == table.df
        assert loaded.default_idf == table.default_idf


class _StubTable:
    def __init__(self, values):
        self.values = values

    def idf(self, token):
        return self.values[token]


class TestIdfStats:
    def test_identical_sentences_have_no_s_only(self):
        table = build_idf(["a b", "a c"])
        mean_sh, max_sh, mean_only, max_only = idf_stats(["a", "b"], ["a", "b"], table)
        assert mean_only == 0.0 and max_only == 0.0
        assert mean_sh > 0 and max_sh > 0

    def test_disjoint_sentences_have_no_shared(self):
        table = build_idf(["a b x y"])
        mean_sh, max_sh, _, _ = idf_stats(["a", "b"], ["x", "y"], table)
        assert mean_sh == 0.0 and max_sh == 0.0

    def test_hand_computed(self):
        table = _StubTable({"a": 1.0, "b": 3.0})
        assert idf_stats(["a", "b"], ["a"], table) == (1.0, 1.0, 3.0, 3.0)

    def test_empty_seed_rejected(self):
        table = build_idf(["a"])
        with pytest.raises(ValueError):
            idf_stats([], ["a"], table)
