"""Snowclone: phrasal-template induction and pop-culture reference detection.

A snowclone is a customizable phrasal template ("* is the new *") realized
in many recognizable variants.  This package learns wildcard templates from
seed quotes, decides whether candidate sentences reference a seed, and
annotates references in web text through a local HTTP service.
"""
from snowclone.datasets import SplitSpec, SynthConfig, group_split, synth_generate
from snowclone.detector import (
    DetectorModel,
    ReferencePair,
    classify,
    extract_features,
    train_detector,
)
from snowclone.lsh import LshIndex, build_index, estimate_jaccard, minhash_signature, query, shingle
from snowclone.pattern import (
    KEEP,
    WILD,
    SnowclonePattern,
    induce_pattern,
    match,
    matches,
    parse_pattern,
)
from snowclone.service import Annotation, ScanEngine, SeedEntry, extract_candidates, scan
from snowclone.tagger import TaggedExample, TaggerModel, tag, train_tagger
from snowclone.text import (
    IdfTable,
    TokenSeq,
    build_idf,
    edit_distance,
    idf_stats,
    lcs_length,
    longest_common_substring,
    tokenize,
)

__version__ = "0.1.0"

__all__ = [
    "Annotation",
    "DetectorModel",
    "IdfTable",
    "KEEP",
    "LshIndex",
    "ReferencePair",
    "ScanEngine",
    "SeedEntry",
    "SnowclonePattern",
    "SplitSpec",
    "SynthConfig",
    "TaggedExample",
    "TaggerModel",
    "TokenSeq",
    "WILD",
    "build_idf",
    "build_index",
    "classify",
    "edit_distance",
    "estimate_jaccard",
    "extract_candidates",
    "extract_features",
    "group_split",
    "idf_stats",
    "induce_pattern",
    "lcs_length",
    "longest_common_substring",
    "match",
    "matches",
    "minhash_signature",
    "parse_pattern",
    "query",
    "scan",
    "shingle",
    "synth_generate",
    "tag",
    "tokenize",
    "train_detector",
    "train_tagger",
    "__version__",
]
