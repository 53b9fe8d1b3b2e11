import json
import math

import pytest

from snowclone.datasets import SynthConfig, synth_generate
from snowclone.detector import train_detector
from snowclone.service import (
    Annotation,
    ConfigurationError,
    ScanEngine,
    SeedEntry,
    ServiceConfig,
    annotation_to_wire,
    extract_candidates,
    load_config,
    load_seeds,
    save_config,
    save_seeds,
    scan,
)
from snowclone.tagger import train_tagger
from snowclone.text import TokenSeq, build_idf_from_token_seqs, tokenize


class TestExtractCandidates:
    def test_short_fragment_dropped(self):
        cands = extract_candidates("Nobody puts TV in a corner. Ok then.")
        assert len(cands) == 1
        assert cands[0].tokens == ("nobody", "puts", "tv", "in", "a", "corner")

    def test_empty_text(self):
        assert extract_candidates("") == []
        assert extract_candidates("   \n\n  ") == []

    def test_no_terminators_whole_text(self):
        text = "orange is the new black"
        cands = extract_candidates(text)
        assert len(cands) == 1
        lo, hi = cands[0].source_span
        assert text[lo:hi] == text

    def test_offsets_slice_the_original(self):
        text = "Filler up front! Nobody puts TV in a corner. And more? Yes\nlast line here"
        cands = extract_candidates(text)
        slices = [text[lo:hi] for lo, hi in (c.source_span for c in cands)]
        assert "Nobody puts TV in a corner" in slices
        assert "Filler up front" in slices
        assert "last line here" in slices
        for c, sl in zip(cands, slices):
            assert tokenize(sl).tokens == c.tokens

    def test_sorted_and_disjoint(self):
        text = ". ".join(f"sentence number {i} right here" for i in range(12))
        cands = extract_candidates(text)
        assert len(cands) == 12
        spans = [c.source_span for c in cands]
        assert spans == sorted(spans)
        assert all(a[1] <= b[0] for a, b in zip(spans, spans[1:]))

    def test_length_bounds(self):
        two = "so what."
        three = "so what now."
        assert extract_candidates(two) == []
        assert len(extract_candidates(three)) == 1
        sixty = " ".join(f"tok{i}" for i in range(60))
        sixty_one = " ".join(f"tok{i}" for i in range(61))
        assert len(extract_candidates(sixty)) == 1
        assert extract_candidates(sixty_one) == []

    def test_punctuation_only_fragment(self):
        assert extract_candidates("--- ,,, ;;;") == []


class TestSeedFiles:
    def entry(self, sid="dd1"):
        return SeedEntry(
            seed_id=sid,
            quote=tokenize("Nobody puts Baby in a corner"),
            origin_title="Dirty Dancing",
            origin_note="film quote",
        )

    def test_round_trip(self, tmp_path):
        path = tmp_path / "seeds.ndjson"
        seeds = [self.entry("a"), self.entry("b")]
        save_seeds(seeds, path)
        loaded = load_seeds(path)
        assert [s.seed_id for s in loaded] == ["a", "b"]
        assert loaded[0].quote.tokens == ("nobody", "puts", "baby", "in", "a", "corner")
        assert loaded[0].origin_title == "Dirty Dancing"

    def test_blank_lines_ok(self, tmp_path):
        path = tmp_path / "seeds.ndjson"
        rec = json.dumps(
            {"seed_id": "x", "quote": ["a", "b"], "origin_title": "", "origin_note": ""}
        )
        path.write_text(f"\n{rec}\n\n")
        assert len(load_seeds(path)) == 1

    def test_duplicate_id_rejected(self, tmp_path):
        path = tmp_path / "seeds.ndjson"
        save_seeds([self.entry("same"), self.entry("same")], path)
        with pytest.raises(ConfigurationError, match="duplicate"):
            load_seeds(path)

    def test_missing_field_rejected(self, tmp_path):
        path = tmp_path / "seeds.ndjson"
        path.write_text('{"seed_id": "x", "quote": ["a", "b"]}\n')
        with pytest.raises(ConfigurationError, match=":1:"):
            load_seeds(path)

    def test_empty_quote_rejected(self, tmp_path):
        path = tmp_path / "seeds.ndjson"
        path.write_text(
            '{"seed_id": "x", "quote": [], "origin_title": "", "origin_note": ""}\n'
        )
        with pytest.raises(ConfigurationError):
            load_seeds(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "seeds.ndjson"
        path.write_text("")
        with pytest.raises(ConfigurationError, match="no seeds"):
            load_seeds(path)

    def test_entry_validation(self):
        with pytest.raises(ValueError):
            SeedEntry(seed_id="", quote=tokenize("a b c"))
        with pytest.raises(ValueError):
            SeedEntry(seed_id="x", quote=TokenSeq(()))


class TestAnnotation:
    def test_span_validation(self):
        with pytest.raises(ValueError):
            Annotation(-1, 4, "s", 0.0, "text")
        with pytest.raises(ValueError):
            Annotation(4, 4, "s", 0.0, "")

    def test_wire_format(self):
        a = Annotation(2, 7, "s1", 1.25, "hello")
        assert annotation_to_wire(a) == {
            "char_start": 2,
            "char_end": 7,
            "seed_id": "s1",
            "score": 1.25,
            "matched_text": "hello",
        }

    def test_wire_verbatim_sentinel_is_null(self):
        a = Annotation(0, 5, "s1", math.inf, "hello")
        assert annotation_to_wire(a)["score"] is None


class TestServiceConfig:
    def test_defaults(self):
        cfg = ServiceConfig()
        assert cfg.port == 8765
        assert cfg.max_body_bytes == 1_000_000
        assert (cfg.lsh_k, cfg.lsh_bands, cfg.lsh_rows) == (128, 64, 2)
        assert cfg.jaccard_threshold == 0.2

    def test_validation(self):
        with pytest.raises(ConfigurationError):
            ServiceConfig(port=0)
        with pytest.raises(ConfigurationError):
            ServiceConfig(lsh_k=128, lsh_bands=32, lsh_rows=2)
        with pytest.raises(ConfigurationError):
            ServiceConfig(jaccard_threshold=1.5)
        with pytest.raises(ConfigurationError):
            ServiceConfig(max_body_bytes=0)

    def test_round_trip(self, tmp_path):
        cfg = ServiceConfig(port=9000, lsh_k=64, lsh_bands=32, lsh_rows=2,
                            jaccard_threshold=0.3)
        path = tmp_path / "svc.cfg"
        save_config(cfg, path)
        assert load_config(path) == cfg

    def test_partial_file_uses_defaults(self, tmp_path):
        path = tmp_path / "svc.cfg"
        path.write_text("snowclone-config\tv1\nport=9001\n\n# comment\n")
        cfg = load_config(path)
        assert cfg.port == 9001
        assert cfg.lsh_k == 128

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "svc.cfg"
        path.write_text("snowclone-config\tv1\nbogus=3\n")
        with pytest.raises(ConfigurationError, match=":2:"):
            load_config(path)

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "svc.cfg"
        path.write_text("something-else\tv1\nport=9001\n")
        with pytest.raises(ConfigurationError):
            load_config(path)


WORLD_CFG = SynthConfig(rng_seed=0)


def synth_seeds(pairs):
    """One SeedEntry per group, taken from each group's identity pair."""
    seeds, seen = [], set()
    for p in pairs:
        if p.seed_id not in seen:
            seen.add(p.seed_id)
            seeds.append(
                SeedEntry(
                    seed_id=p.seed_id,
                    quote=p.seed,
                    origin_title="synthetic",
                    origin_note=f"pattern {p.seed_id}",
                )
            )
    return seeds


@pytest.fixture(scope="module")
def world(tmp_path_factory):
    """Models trained on generator output, persisted, and reloaded
    through ScanEngine.load the way serving would."""
    tagged, pairs = synth_generate(WORLD_CFG)
    tagger = train_tagger(tagged, epochs=10, train_seed=0)
    idf = build_idf_from_token_seqs(
        list({p.candidate.tokens: p.candidate for p in pairs}.values())
        + [ex.sentence for ex in tagged]
    )
    detector = train_detector(pairs, tagger, idf)
    seeds = synth_seeds(pairs)

    from snowclone.detector import save_detector
    from snowclone.tagger import save_tagger
    from snowclone.text import save_idf

    model_dir = tmp_path_factory.mktemp("models")
    save_tagger(tagger, model_dir / "tagger.model")
    save_detector(detector, model_dir / "detector.model")
    save_idf(idf, model_dir / "idf.tsv")
    seed_file = model_dir / "seeds.ndjson"
    save_seeds(seeds, seed_file)

    engine = ScanEngine.load(model_dir, seed_file)
    variants = {}  # seed_id -> a positive candidate that is not the seed
    for p in pairs:
        if p.label == 1 and p.candidate.tokens != p.seed.tokens:
            variants.setdefault(p.seed_id, p.candidate)
    return {
        "engine": engine,
        "seeds": seeds,
        "variants": variants,
        "model_dir": model_dir,
        "seed_file": seed_file,
    }


DISTRACTORS = [
    "the committee will reconvene after the autumn recess",
    "please water the plants twice a week while away",
    "quarterly earnings were flat despite heavy marketing spend",
]


class TestScan:
    def test_verbatim_seed_is_annotated(self, world):
        seed = world["seeds"][0]
        quote = " ".join(seed.quote.tokens)
        text = f"{DISTRACTORS[0]}. {quote}. {DISTRACTORS[1]}."
        anns = world["engine"].annotate(text)
        assert len(anns) == 1
        a = anns[0]
        assert a.seed_id == seed.seed_id
        assert a.score == math.inf
        assert text[a.char_start : a.char_end] == a.matched_text == quote

    def test_unrelated_text_is_clean(self, world):
        text = ". ".join(DISTRACTORS) + "."
        assert world["engine"].annotate(text) == []

    def test_variant_is_attributed_to_its_seed(self, world):
        sid, variant = next(iter(world["variants"].items()))
        text = f"{DISTRACTORS[2]}. " + " ".join(variant.tokens) + "!"
        anns = world["engine"].annotate(text)
        assert [a.seed_id for a in anns] == [sid]
        assert math.isfinite(anns[0].score)

    def test_multiple_hits_sorted_and_disjoint(self, world):
        items = sorted(world["variants"].items())[:3]
        parts = []
        for i, (sid, variant) in enumerate(items):
            parts.append(DISTRACTORS[i % len(DISTRACTORS)])
            parts.append(" ".join(variant.tokens))
        text = ". ".join(parts) + "."
        anns = world["engine"].annotate(text)
        assert [a.seed_id for a in anns] == [sid for sid, _ in items]
        starts = [a.char_start for a in anns]
        assert starts == sorted(starts)
        assert all(
            a.char_end <= b.char_start for a, b in zip(anns, anns[1:])
        )
        for a in anns:
            assert text[a.char_start : a.char_end] == a.matched_text

    def test_deterministic(self, world):
        seed = world["seeds"][1]
        text = " ".join(seed.quote.tokens) + "."
        assert world["engine"].annotate(text) == world["engine"].annotate(text)

    def test_missing_pieces_raise(self, world):
        e = world["engine"]
        with pytest.raises(ConfigurationError):
            scan("some text here", [], e.index, e.detector, e.tagger, e.idf)
        with pytest.raises(ConfigurationError):
            scan("some text here", e.seeds, None, e.detector, e.tagger, e.idf)


class TestScanEngineLoad:
    def test_missing_model_file(self, tmp_path, world):
        with pytest.raises(ConfigurationError, match="tagger.model"):
            ScanEngine.load(tmp_path, world["seed_file"])

    def test_missing_seed_file(self, tmp_path, world):
        with pytest.raises(ConfigurationError, match="seed file"):
            ScanEngine.load(world["model_dir"], tmp_path / "nope.ndjson")

    def test_loaded_engine_round_trips_config(self, world):
        assert world["engine"].config == ServiceConfig()
