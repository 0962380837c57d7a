"""Command-line entry point.

    peerscope all --input corpus.jsonl --out out/ --seed 7
    peerscope metrics --out out/ --graph crn --kind pagerank --damping 0.9

Exit codes: 0 success, 1 validation or stage failure, 2 bad usage.
The output directory defaults to ``$PEERSCOPE_OUT``.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .categorizer import Thresholds
from .corpus import CorpusError, write_csv_bundle, write_jsonl
from .netbuild import NETWORKS
from .netmetrics import KINDS, ConvergenceError
from .pipeline import STAGES, RunConfig, StageError, run_stages
from .synth import SynthConfig, generate, load_config, planted_labels

ENV_OUT = "PEERSCOPE_OUT"


def _ranged(kind, lo=None, hi=None, lo_open=False, hi_open=False):
    def parse(text: str):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {kind.__name__}, got {text!r}") from None
        bad_lo = lo is not None and (v <= lo if lo_open else v < lo)
        bad_hi = hi is not None and (v >= hi if hi_open else v > hi)
        if bad_lo or bad_hi:
            left = "(" if lo_open else "["
            right = ")" if hi_open else "]"
            raise argparse.ArgumentTypeError(
                f"{text} out of range {left}{'-inf' if lo is None else lo}, {'inf' if hi is None else hi}{right}")
        return v
    return parse


prob = _ranged(float, 0.0, 1.0)
open_unit = _ranged(float, 0.0, 1.0, lo_open=True, hi_open=True)
pos_int = _ranged(int, 1)
nonneg_int = _ranged(int, 0)
pos_float = _ranged(float, 0.0, lo_open=True)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--out", type=Path, default=os.environ.get(ENV_OUT),
                   help=f"output directory (default: ${ENV_OUT})")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")


def _input(p, required: bool):
    p.add_argument("--input", type=Path, required=required, help="papers.jsonl file or CSV bundle directory")
    p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")


def _categorize(p):
    g = p.add_argument_group("categorizer")
    g.add_argument("--high-rate", type=prob, default=0.7, help="yearly rate must exceed this (default 0.7)")
    g.add_argument("--high-fraction", type=prob, default=0.70, help="share of active years (default 0.70)")
    g.add_argument("--low-rate", type=prob, default=0.4, help="yearly rate must be below this (default 0.4)")
    g.add_argument("--low-fraction", type=prob, default=0.80, help="share of active years (default 0.80)")


def _features(p):
    p.add_argument("--include-rejected", action="store_true",
                   help="count reviewers/editors of rejected papers in diversity indices")


def _graphs(p):
    g = p.add_argument_group("graphs")
    g.add_argument("--strict-crn", action="store_true", help="co-reviewer edges need two distinct papers")
    g.add_argument("--assignment-top", type=nonneg_int, default=None,
                   help="keep the N most cited authors in the reviewer/editor assignment graphs")


def _metrics(p):
    g = p.add_argument_group("metrics")
    g.add_argument("--graph", choices=NETWORKS + ("all",), default="all")
    g.add_argument("--kind", choices=KINDS + ("all",), default="all")
    g.add_argument("--damping", type=open_unit, default=0.85, help="PageRank damping in (0, 1)")
    g.add_argument("--tol", type=pos_float, default=1e-9, help="PageRank L1 tolerance")
    g.add_argument("--max-iter", type=pos_int, default=200)
    g.add_argument("--raw-betweenness", action="store_true", help="skip the (n-1)(n-2) normalization")
    g.add_argument("--workers", type=pos_int, default=1, help="processes for betweenness/closeness")


def _predict(p):
    g = p.add_argument_group("classifier")
    g.add_argument("--model", choices=("rf", "gbt", "both"), default="both")
    g.add_argument("--trees", type=pos_int, default=200)
    g.add_argument("--max-depth", type=pos_int, default=12, help="forest tree depth")
    g.add_argument("--rounds", type=pos_int, default=300)
    g.add_argument("--learning-rate", type=pos_float, default=0.1)
    g.add_argument("--gbt-depth", type=pos_int, default=3)
    g.add_argument("--test-fraction", type=open_unit, default=0.3)
    g.add_argument("--train-years", type=pos_int, default=3)
    g.add_argument("--gap-years", type=nonneg_int, default=2)


def _seed(p):
    p.add_argument("--seed", type=nonneg_int, default=0, help="seed for every random choice")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="peerscope", description="Peer-review corpus analytics.")
    parser.add_argument("--version", action="version", version=f"peerscope {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("ingest", help="validate a corpus and store it in the output directory")
    _common(p)
    _input(p, True)

    p = sub.add_parser("synth", help="write a synthetic corpus")
    p.add_argument("--config", type=Path, help="key = value config file")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override one config key")
    p.add_argument("--seed", type=nonneg_int, default=None)
    p.add_argument("--output", type=Path, required=True, help="JSONL file, or directory for --format csv")
    p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    p.add_argument("--intents", type=Path, help="also write author_id,intent CSV here")
    p.add_argument("-v", "--verbose", action="store_true")

    for name, helptext, adders in (
        ("categorize", "label authors High/Mid/Low", [_categorize]),
        ("features", "profile and review features, diversity indices", [_features]),
        ("graphs", "build and export the author networks", [_graphs]),
        ("metrics", "centralities, k-shells, density, assortativity", [_metrics]),
        ("crosscat", "edge matrices, overlap audit, mixed teams", []),
        ("predict", "train and evaluate the early-career classifiers", [_seed, _predict, _features]),
        ("report", "summary tables and charts", []),
    ):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        for add in adders:
            add(p)

    p = sub.add_parser("all", help="run every stage in order")
    _common(p)
    _input(p, True)
    _seed(p)
    for add in (_categorize, _features, _graphs, _metrics, _predict):
        add(p)
    return parser


def _run_config(args) -> RunConfig:
    get = lambda name, default: getattr(args, name, default)  # noqa: E731
    return RunConfig(
        out=args.out,
        input=get("input", None),
        format=get("format", "jsonl"),
        seed=get("seed", 0),
        thresholds=Thresholds(get("high_rate", 0.7), get("high_fraction", 0.70),
                              get("low_rate", 0.4), get("low_fraction", 0.80)),
        graph=get("graph", "all"),
        kind=get("kind", "all"),
        damping=get("damping", 0.85),
        tol=get("tol", 1e-9),
        max_iter=get("max_iter", 200),
        normalized=not get("raw_betweenness", False),
        workers=get("workers", 1),
        strict_crn=get("strict_crn", False),
        include_rejected=get("include_rejected", False),
        model=get("model", "both"),
        trees=get("trees", 200),
        max_depth=get("max_depth", 12),
        rounds=get("rounds", 300),
        learning_rate=get("learning_rate", 0.1),
        gbt_depth=get("gbt_depth", 3),
        test_fraction=get("test_fraction", 0.3),
        train_years=get("train_years", 3),
        gap_years=get("gap_years", 2),
        assignment_top=get("assignment_top", None),
    )


def _synth(args) -> int:
    text = args.config.read_text(encoding="utf-8") if args.config else ""
    extra = "\n".join(args.set)
    if args.seed is not None:
        extra += f"\nseed = {args.seed}"
    config = SynthConfig.from_text(text + "\n" + extra) if (text or extra.strip()) else SynthConfig()
    corpus = generate(config)
    if args.format == "jsonl":
        args.output.parent.mkdir(parents=True, exist_ok=True)
        write_jsonl(corpus, args.output)
    else:
        write_csv_bundle(corpus, args.output)
    if args.intents:
        lines = ["author_id,intent"] + [f"{a},{c.value}" for a, c in planted_labels(config).items()]
        args.intents.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "synth":
            return _synth(args)
        if args.out is None:
            parser.error(f"--out is required when ${ENV_OUT} is not set")
        cfg = _run_config(args)
        stages = STAGES if args.command == "all" else (args.command,)
        run_stages(cfg, stages, args.command)
    except CorpusError as exc:
        print(f"peerscope: invalid corpus: {exc}", file=sys.stderr)
        return 1
    except StageError as exc:
        print(f"peerscope: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ConvergenceError, OSError) as exc:
        print(f"peerscope: {args.command} failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
