"""
Scanning a page for references
==============================

The serving pipeline end to end, without the HTTP layer: train models
on a synthetic world, stand up the LSH index over its seed quotes, and
scan a composed page.  Planted variants come back attributed to their
seeds; a verbatim quote short-circuits with an infinite score; filler
sentences die in the LSH filter before the detector ever runs.
"""

import math

from snowclone import ScanEngine, SeedEntry, SynthConfig, build_index, synth_generate
from snowclone.detector import train_detector
from snowclone.service import ServiceConfig
from snowclone.tagger import train_tagger
from snowclone.text import build_idf_from_token_seqs

# --- a trained world ------------------------------------------------
tagged, pairs = synth_generate(SynthConfig(n_patterns=20, rng_seed=42))
tagger = train_tagger(tagged, epochs=10, train_seed=42)
uniq = {p.candidate.tokens: p.candidate for p in pairs}
for ex in tagged:
    uniq.setdefault(ex.sentence.tokens, ex.sentence)
idf = build_idf_from_token_seqs(uniq.values())
detector = train_detector(pairs, tagger, idf)

# One SeedEntry per pattern, plus a non-identity variant to plant later.
seeds, variants = [], {}
for p in pairs:
    if all(s.seed_id != p.seed_id for s in seeds):
        seeds.append(SeedEntry(p.seed_id, p.seed, "synthetic corpus", ""))
    if p.label == 1 and p.candidate.tokens != p.seed.tokens:
        variants.setdefault(p.seed_id, p.candidate)

cfg = ServiceConfig()
index = build_index(((s.seed_id, s.quote) for s in seeds),
                    k=cfg.lsh_k, b=cfg.lsh_bands, r=cfg.lsh_rows,
                    hash_seed=cfg.hash_seed)
engine = ScanEngine(seeds, tagger, detector, idf, index, cfg)

# --- a page to scan -------------------------------------------------
verbatim = " ".join(seeds[0].quote.tokens)
planted = " ".join(variants[seeds[3].seed_id].tokens)
page = ". ".join([
    "the quiet archivist catalogued maps",
    planted,
    "heavy rain delayed every northbound train",
    verbatim,
    "local bees prefer the lavender rows",
]) + "."

print("page:", page)
print()
for a in engine.annotate(page):
    label = "exact quote" if math.isinf(a.score) else f"score {a.score:.2f}"
    print(f"  [{a.char_start}:{a.char_end}] {a.seed_id} ({label}): {a.matched_text!r}")

# The same engine backs the HTTP service:
#
#   snowclone serve --model-dir models --seed-file seeds.ndjson
#   curl -s localhost:8765/annotate -d '{"text": "..."}'
#
# On the wire the infinite verbatim score is serialized as null.
