"""Command line driver: train, evaluate, split, synthesize, scan, serve.

Each subcommand does one thing to the files it is given, so workflows
compose:

    snowclone synth --out-dir data
    snowclone train-tagger data/patterns.ndjson --model-dir models
    snowclone train-detector data/references.ndjson --model-dir models
    snowclone scan page.txt --model-dir models --seed-file data/seeds.ndjson
    snowclone serve --model-dir models --seed-file data/seeds.ndjson
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .datasets import (
    SplitSpec,
    SynthConfig,
    group_split,
    load_pattern_dataset,
    load_reference_dataset,
    save_pattern_dataset,
    save_reference_dataset,
    synth_generate,
)
from .detector import (
    ReferencePair,
    eval_detector,
    load_detector,
    majority_metrics,
    save_detector,
    train_detector,
)
from .service import (
    DETECTOR_FILE,
    IDF_FILE,
    TAGGER_FILE,
    ConfigurationError,
    ScanEngine,
    SeedEntry,
    ServiceConfig,
    annotation_to_wire,
    load_config,
    save_seeds,
)
from .tagger import (
    TagMetrics,
    eval_tagger,
    load_tagger,
    naive_baseline,
    save_tagger,
    train_tagger,
    tune_wild_bias,
)
from .text import build_idf_from_token_seqs, load_idf, save_idf


def _service_config(args: argparse.Namespace) -> ServiceConfig:
    return load_config(args.config) if args.config else ServiceConfig()


def _require_seed_file(args: argparse.Namespace) -> str:
    if not args.seed_file:
        raise ConfigurationError("--seed-file is required for this command")
    return args.seed_file


def _print_tag_metrics(label: str, met: TagMetrics) -> None:
    print(
        f"{label}: accuracy {met.accuracy:.3f}  "
        f"wild_recall {met.wild_recall:.3f}  "
        f"wild_precision {met.wild_precision:.3f}"
    )


def _print_binary_metrics(label: str, met) -> None:
    print(
        f"{label}: accuracy {met.accuracy:.3f}  "
        f"precision {met.precision:.3f}  recall {met.recall:.3f}"
    )


def _reference_idf(pairs: Sequence[ReferencePair]):
    """Document-frequency table over the distinct sentences in the pairs.

    Sentences are deduplicated so a seed quoted in fifty pairs counts as
    one document, not fifty.
    """
    seen: set[tuple[str, ...]] = set()
    seqs = []
    for p in pairs:
        for seq in (p.seed, p.candidate):
            if seq.tokens not in seen:
                seen.add(seq.tokens)
                seqs.append(seq)
    return build_idf_from_token_seqs(seqs)


def _cmd_train_tagger(args: argparse.Namespace) -> int:
    examples = load_pattern_dataset(args.data)
    spec = SplitSpec(split_seed=args.split_seed)
    train, dev, test = group_split(examples, lambda ex: ex.group_id, spec)
    print(f"split: {len(train)} train / {len(dev)} dev / {len(test)} test")
    m = train_tagger(train, epochs=args.epochs, train_seed=args.rng_seed)
    if dev:
        m = tune_wild_bias(m, dev)
        print(f"tuned wild_bias {m.wild_bias}")
        _print_tag_metrics("dev", eval_tagger(m, dev))
    if test:
        _print_tag_metrics("test", eval_tagger(m, test))
        _print_tag_metrics("test naive", naive_baseline(test))
    out = Path(args.model_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_tagger(m, out / TAGGER_FILE)
    print(f"wrote {out / TAGGER_FILE}")
    return 0


def _cmd_eval_tagger(args: argparse.Namespace) -> int:
    m = load_tagger(Path(args.model_dir) / TAGGER_FILE)
    examples = load_pattern_dataset(args.data)
    _print_tag_metrics("tagger", eval_tagger(m, examples))
    _print_tag_metrics("naive", naive_baseline(examples))
    return 0


def _cmd_train_detector(args: argparse.Namespace) -> int:
    tagger_path = Path(args.model_dir) / TAGGER_FILE
    if not tagger_path.is_file():
        raise ConfigurationError(
            f"{tagger_path}: train the tagger first (train-tagger)"
        )
    m = load_tagger(tagger_path)
    pairs = load_reference_dataset(args.data)
    idf = _reference_idf(pairs)
    spec = SplitSpec(split_seed=args.split_seed)
    train, dev, test = group_split(pairs, lambda p: p.seed_id, spec)
    print(f"split: {len(train)} train / {len(dev)} dev / {len(test)} test")
    d = train_detector(
        train,
        m,
        idf,
        train_seed=args.rng_seed,
        iterations=args.iterations,
        learning_rate=args.learning_rate,
    )
    _print_binary_metrics("train", eval_detector(d, train, m, idf))
    if test:
        _print_binary_metrics("test", eval_detector(d, test, m, idf))
        _print_binary_metrics("test majority", majority_metrics(test))
    out = Path(args.model_dir)
    save_detector(d, out / DETECTOR_FILE)
    save_idf(idf, out / IDF_FILE)
    print(f"wrote {out / DETECTOR_FILE} and {out / IDF_FILE}")
    return 0


def _cmd_eval_detector(args: argparse.Namespace) -> int:
    model_dir = Path(args.model_dir)
    m = load_tagger(model_dir / TAGGER_FILE)
    d = load_detector(model_dir / DETECTOR_FILE)
    idf = load_idf(model_dir / IDF_FILE)
    pairs = load_reference_dataset(args.data)
    _print_binary_metrics("detector", eval_detector(d, pairs, m, idf))
    _print_binary_metrics("majority", majority_metrics(pairs))
    return 0


def _peek_schema(path: str) -> str:
    """First record's keys decide pattern vs reference NDJSON."""
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError:
                continue
            if isinstance(rec, dict):
                if "tokens" in rec:
                    return "pattern"
                if "seed" in rec:
                    return "reference"
            break
    raise ConfigurationError(f"{path}: cannot tell pattern from reference data")


def _cmd_split(args: argparse.Namespace) -> int:
    kind = _peek_schema(args.data)
    spec = SplitSpec(split_seed=args.split_seed)
    if kind == "pattern":
        items = load_pattern_dataset(args.data)
        parts = group_split(items, lambda ex: ex.group_id, spec)
        save = save_pattern_dataset
    else:
        items = load_reference_dataset(args.data)
        parts = group_split(items, lambda p: p.seed_id, spec)
        save = save_reference_dataset
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.data).stem
    for name, part in zip(("train", "dev", "test"), parts):
        path = out_dir / f"{stem}.{name}.ndjson"
        save(part, path)
        print(f"wrote {path} ({len(part)} records)")
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    cfg = SynthConfig(
        n_patterns=args.patterns,
        instances_per_pattern=args.instances,
        negative_rate=args.negative_rate,
        rng_seed=args.rng_seed,
    )
    tagger_data, detector_data = synth_generate(cfg)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_pattern_dataset(tagger_data, out_dir / "patterns.ndjson")
    save_reference_dataset(detector_data, out_dir / "references.ndjson")
    # One seed entry per pattern, from each group's identity pair.
    seeds: list[SeedEntry] = []
    seen: set[str] = set()
    for p in detector_data:
        if p.seed_id not in seen:
            seen.add(p.seed_id)
            seeds.append(
                SeedEntry(
                    seed_id=p.seed_id,
                    quote=p.seed,
                    origin_title="synthetic",
                    origin_note=f"generated with rng_seed={cfg.rng_seed}",
                )
            )
    save_seeds(seeds, out_dir / "seeds.ndjson")
    print(
        f"wrote {len(tagger_data)} tagged sentences, "
        f"{len(detector_data)} reference pairs, {len(seeds)} seeds to {out_dir}"
    )
    return 0


def _cmd_scan(args: argparse.Namespace) -> int:
    engine = ScanEngine.load(
        args.model_dir, _require_seed_file(args), _service_config(args)
    )
    text = Path(args.file).read_text(encoding="utf-8")
    doc = {"annotations": [annotation_to_wire(a) for a in engine.annotate(text)]}
    print(json.dumps(doc, indent=2))
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .server import serve

    serve(_service_config(args), args.model_dir, _require_seed_file(args))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed-file", metavar="PATH", help="NDJSON seed quotes")
    common.add_argument(
        "--model-dir", metavar="DIR", default="models", help="model directory"
    )
    common.add_argument("--split-seed", type=int, default=0, metavar="N")
    common.add_argument("--rng-seed", type=int, default=0, metavar="N")
    common.add_argument("--config", metavar="PATH", help="key=value service config")

    parser = argparse.ArgumentParser(
        prog="snowclone", description="Snowclone reference detection."
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "train-tagger", parents=[common], help="train the KEEP/WILD tagger"
    )
    p.add_argument("data", help="pattern NDJSON file")
    p.add_argument("--epochs", type=int, default=10, metavar="N")
    p.set_defaults(func=_cmd_train_tagger)

    p = sub.add_parser(
        "eval-tagger", parents=[common], help="evaluate a saved tagger"
    )
    p.add_argument("data", help="pattern NDJSON file")
    p.set_defaults(func=_cmd_eval_tagger)

    p = sub.add_parser(
        "train-detector", parents=[common], help="train the reference detector"
    )
    p.add_argument("data", help="reference-pair NDJSON file")
    p.add_argument("--iterations", type=int, default=300, metavar="N")
    p.add_argument("--learning-rate", type=float, default=0.5, metavar="R")
    p.set_defaults(func=_cmd_train_detector)

    p = sub.add_parser(
        "eval-detector", parents=[common], help="evaluate a saved detector"
    )
    p.add_argument("data", help="reference-pair NDJSON file")
    p.set_defaults(func=_cmd_eval_detector)

    p = sub.add_parser(
        "split", parents=[common], help="group-constrained 60/20/20 split"
    )
    p.add_argument("data", help="pattern or reference NDJSON file")
    p.add_argument("--out-dir", default=".", metavar="DIR")
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser(
        "synth", parents=[common], help="generate synthetic datasets"
    )
    p.add_argument("--out-dir", default="synth", metavar="DIR")
    p.add_argument("--patterns", type=int, default=12, metavar="N")
    p.add_argument("--instances", type=int, default=9, metavar="N")
    p.add_argument("--negative-rate", type=float, default=0.64, metavar="R")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser(
        "scan", parents=[common], help="annotate a text file, JSON to stdout"
    )
    p.add_argument("file", help="text file to scan")
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("serve", parents=[common], help="run the HTTP service")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
