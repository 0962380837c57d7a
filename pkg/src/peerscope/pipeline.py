"""Batch stages over an output directory.

Each stage reads the corpus and earlier stage outputs from ``out`` and writes
its own files there. File layout::

    corpus.jsonl, ingest.json                      ingest
    categories.csv                                 categorize
    profile_features.csv, review_features.csv,
    diversity.csv                                  features
    graphs/<net>/{nodes,edges}.csv, graphs/*.dot,
    graphs/<role>_author/{nodes,edges}.csv         graphs
    metrics/<net>/{metrics,kshell}.csv,
    metrics/shell_occupancy.csv,
    metrics/network_summary.csv                    metrics
    edge_matrix.csv, overlap_report.csv,
    mixed_team.csv, citation_uplift.csv,
    reciprocity.csv                                crosscat
    predict/dataset.csv, predict/<model>/...       predict
    report/...                                     report
"""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

from . import __version__
from . import netmetrics as nm
from .categorizer import CATEGORIES, Category, Thresholds, categorize_all, write_categories_csv
from .classifier import (FEATURE_NAMES, SplitSpec, build_dataset, evaluate_dataset, save_model,
                         split_authors, train_gbt, train_random_forest, write_eval_report,
                         write_importances_csv)
from .corpus import Corpus, load_corpus, write_jsonl
from .crosscat import (assignment_overlap, citation_uplift, class_edge_matrix, mixed_team_report,
                       write_edge_matrix_csv, write_mixed_team_csv, write_overlap_csv)
from .netbuild import (NETWORKS, build_assignment_graph, build_crn, build_network, induced_subgraph,
                       read_graph_csv, to_dot, write_graph_csv)
from .profilefeat import all_profile_features, write_profile_csv
from .textfeat import EMOTIONS, author_review_features, category_diversity

logger = logging.getLogger(__name__)

STAGES = ("ingest", "categorize", "features", "graphs", "metrics", "crosscat", "predict", "report")
MODELS = ("rf", "gbt")


class StageError(RuntimeError):
    """A stage could not run; ``stage`` names the stage whose output is missing or bad."""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"[{stage}] {message}")


@dataclass
class RunConfig:
    out: Path
    input: Path | None = None
    format: str = "jsonl"
    seed: int = 0
    thresholds: Thresholds = field(default_factory=Thresholds)
    graph: str = "all"
    kind: str = "all"
    damping: float = 0.85
    tol: float = 1e-9
    max_iter: int = 200
    normalized: bool = True
    workers: int = 1
    strict_crn: bool = False
    include_rejected: bool = False
    model: str = "both"
    trees: int = 200
    max_depth: int = 12
    rounds: int = 300
    learning_rate: float = 0.1
    gbt_depth: int = 3
    test_fraction: float = 0.3
    train_years: int = 3
    gap_years: int = 2
    assignment_top: int | None = None

    def to_dict(self) -> dict:
        """Settings recorded in the manifest (paths reduced to file names)."""
        d = asdict(self)
        d.pop("out")
        d["input"] = self.input.name if self.input is not None else None
        return d


# -- helpers -----------------------------------------------------------------------

def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return f"{x:.10g}" if isinstance(x, float) else str(x)


def _writer(path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    fh = open(path, "w", encoding="utf-8", newline="")
    return fh, csv.writer(fh, lineterminator="\n")


def _need(cfg: RunConfig, stage: str, *names: str) -> list[Path]:
    paths = [cfg.out / n for n in names]
    missing = [str(p.relative_to(cfg.out)) for p in paths if not p.exists()]
    if missing:
        raise StageError(stage, f"missing output {', '.join(missing)}; run the '{stage}' stage first")
    return paths


def read_corpus(cfg: RunConfig) -> Corpus:
    (path,) = _need(cfg, "ingest", "corpus.jsonl")
    return load_corpus(path, "jsonl")


def read_labels(cfg: RunConfig) -> dict[str, Category]:
    (path,) = _need(cfg, "categorize", "categories.csv")
    with open(path, encoding="utf-8", newline="") as fh:
        return {row["author_id"]: Category(row["category"]) for row in csv.DictReader(fh)}


# -- stages ----------------------------------------------------------------------------

def stage_ingest(cfg: RunConfig) -> list[Path]:
    if cfg.input is None:
        raise StageError("ingest", "no --input given")
    corpus = load_corpus(cfg.input, cfg.format)
    cfg.out.mkdir(parents=True, exist_ok=True)
    out = write_jsonl(corpus, cfg.out / "corpus.jsonl")
    summary = {
        "papers": len(corpus),
        "authors": len(corpus.authors),
        "years": [min(corpus.years), max(corpus.years)],
        "accepted": sum(p.accepted for p in corpus),
        "unresolved_citations": len(corpus.unresolved),
    }
    s = cfg.out / "ingest.json"
    s.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info("ingested %d papers by %d authors", summary["papers"], summary["authors"])
    return [out, s]


def stage_categorize(cfg: RunConfig) -> list[Path]:
    corpus = read_corpus(cfg)
    labels = categorize_all(corpus, cfg.thresholds)
    return [write_categories_csv(corpus, labels, cfg.out / "categories.csv")]


def stage_features(cfg: RunConfig) -> list[Path]:
    corpus, labels = read_corpus(cfg), read_labels(cfg)
    prof = write_profile_csv(all_profile_features(corpus), cfg.out / "profile_features.csv")

    rpath = cfg.out / "review_features.csv"
    fh, w = _writer(rpath)
    with fh:
        w.writerow(["author_id", "sentiment", "review_length"] + [f"lqi_{e}" for e in EMOTIONS])
        for a in corpus.authors:
            try:
                f = author_review_features(corpus, a)
            except ValueError:
                continue
            w.writerow([a, _fmt(f.sentiment), _fmt(f.length)] + [_fmt(f.lqi[e]) for e in EMOTIONS])

    dpath = cfg.out / "diversity.csv"
    fh, w = _writer(dpath)
    with fh:
        w.writerow(["category", "role", "entropy", "support", "total"])
        for cat in CATEGORIES:
            for role in ("reviewer", "editor"):
                try:
                    d = category_diversity(corpus, labels, cat, role, include_rejected=cfg.include_rejected)
                    w.writerow([cat.value, role, _fmt(d.entropy), d.support, d.total])
                except ValueError:
                    w.writerow([cat.value, role, "", 0, 0])
    return [prof, rpath, dpath]


def stage_graphs(cfg: RunConfig) -> list[Path]:
    corpus, labels = read_corpus(cfg), read_labels(cfg)
    gdir = cfg.out / "graphs"
    written: list[Path] = []
    for net in NETWORKS:
        g = build_crn(corpus, labels, strict=cfg.strict_crn) if net == "crn" else build_network(net, corpus, labels)
        written += write_graph_csv(g, gdir / net)
        dot = gdir / f"{net}.dot"
        dot.write_text(to_dot(g, net), encoding="utf-8")
        written.append(dot)
    for role in ("reviewer", "editor"):
        bg = build_assignment_graph(corpus, labels, role, author_filter=cfg.assignment_top)
        written += write_graph_csv(bg, gdir / f"{role}_author")
        dot = gdir / f"{role}_author.dot"
        dot.write_text(to_dot(bg), encoding="utf-8")
        written.append(dot)
    return written


def read_graph(cfg: RunConfig, net: str, stage: str = "graphs"):
    _need(cfg, stage, f"graphs/{net}/nodes.csv", f"graphs/{net}/edges.csv")
    return read_graph_csv(cfg.out / "graphs" / net, name=net, directed=(net == "ccn"))


def _centralities(cfg: RunConfig, g, kinds) -> list[nm.CentralityScores]:
    out = []
    for kind in kinds:
        if kind == "degree":
            if len(g) < 2:
                continue
            out.append(nm.degree_centrality(g))
        elif kind == "betweenness":
            out.append(nm.betweenness_centrality(g, normalized=cfg.normalized, workers=cfg.workers))
        elif kind == "closeness":
            out.append(nm.closeness_centrality(g, workers=cfg.workers))
        else:
            out.append(nm.pagerank(g, damping=cfg.damping, tol=cfg.tol, max_iter=cfg.max_iter))
    return out


def stage_metrics(cfg: RunConfig) -> list[Path]:
    nets = NETWORKS if cfg.graph == "all" else (cfg.graph,)
    kinds = nm.KINDS if cfg.kind == "all" else (cfg.kind,)
    written: list[Path] = []
    shell_rows, summary_rows = [], []
    for net in nets:
        g = read_graph(cfg, net)
        mdir = cfg.out / "metrics" / net
        mdir.mkdir(parents=True, exist_ok=True)
        written.append(nm.write_metrics_csv(_centralities(cfg, g, kinds), mdir / "metrics.csv"))
        shells = nm.kshell(g.to_undirected())
        written.append(nm.write_kshell_csv(shells, mdir / "kshell.csv"))
        for row in nm.shell_occupancy(shells, g.labels):
            shell_rows.append({"network": net, **row})
        views = [("all", g)] + [(c.value, induced_subgraph(g, c)) for c in CATEGORIES]
        for name, sub in views:
            row = {"network": net, "category": name, "nodes": len(sub), "edges": sub.n_edges}
            for key, func in (("density", nm.density), ("assortativity", nm.assortativity)):
                try:
                    row[key] = func(sub)
                except ValueError:
                    row[key] = None
            summary_rows.append(row)
    if cfg.graph == "all":
        p = cfg.out / "metrics" / "shell_occupancy.csv"
        fh, w = _writer(p)
        with fh:
            w.writerow(["network", "shell", "k", "authors", "pct_high", "pct_mid", "pct_low"])
            for r in shell_rows:
                w.writerow([r["network"], r["shell"], r["k"], r["authors"],
                            _fmt(r["pct_high"]), _fmt(r["pct_mid"]), _fmt(r["pct_low"])])
        written.append(p)
        p = cfg.out / "metrics" / "network_summary.csv"
        fh, w = _writer(p)
        with fh:
            w.writerow(["network", "category", "nodes", "edges", "density", "assortativity"])
            for r in summary_rows:
                w.writerow([r["network"], r["category"], r["nodes"], r["edges"],
                            _fmt(r["density"]), _fmt(r["assortativity"])])
        written.append(p)
    return written


# mixed-team tables: (name, minority, majority, focus)
MIXED_TABLES = (
    ("low_minority_with_high", Category.LOW, Category.HIGH, Category.LOW),
    ("low_majority_with_high", Category.HIGH, Category.LOW, Category.LOW),
)
MIXED_SHARE = 0.2


def stage_crosscat(cfg: RunConfig) -> list[Path]:
    corpus, labels = read_corpus(cfg), read_labels(cfg)
    graphs = {net: read_graph(cfg, net) for net in NETWORKS}
    matrices = {}
    for net, g in graphs.items():
        if g.n_edges:
            matrices[net] = class_edge_matrix(g, labels)
    written = [write_edge_matrix_csv(matrices, cfg.out / "edge_matrix.csv")]

    reports = []
    for role in ("reviewer", "editor"):
        for cat in CATEGORIES:
            for flt in ("all", "never_collaborated"):
                try:
                    reports.append(assignment_overlap(corpus, labels, role, flt, cat))
                except ValueError as exc:
                    logger.info("overlap %s/%s/%s skipped: %s", role, cat, flt, exc)
        for a, b in ((Category.HIGH, Category.MID), (Category.HIGH, Category.LOW), (Category.MID, Category.LOW)):
            try:
                reports.append(assignment_overlap(corpus, labels, role, "cross_category", a, b))
            except ValueError as exc:
                logger.info("overlap %s/%s-%s skipped: %s", role, a, b, exc)
    written.append(write_overlap_csv(reports, cfg.out / "overlap_report.csv"))

    mixed = {name: mixed_team_report(corpus, labels, minority, majority, MIXED_SHARE, focus_cat=focus)
             for name, minority, majority, focus in MIXED_TABLES}
    written.append(write_mixed_team_csv(mixed, cfg.out / "mixed_team.csv"))

    p = cfg.out / "citation_uplift.csv"
    fh, w = _writer(p)
    with fh:
        w.writerow(["source_category", "target_category", "mean_cited", "mean_uncited"])
        for s in CATEGORIES:
            for t in CATEGORIES:
                try:
                    cited, uncited = citation_uplift(corpus, labels, s, t)
                except ValueError:
                    cited = uncited = None
                w.writerow([s.value, t.value, _fmt(cited), _fmt(uncited)])
    written.append(p)

    p = cfg.out / "reciprocity.csv"
    ccn = graphs["ccn"]
    members = {c: {v for v, lab in labels.items() if lab == c and v in ccn.labels} for c in CATEGORIES}
    fh, w = _writer(p)
    with fh:
        w.writerow(["category_a", "category_b", "reciprocity"])
        for i, a in enumerate(CATEGORIES):
            for b in CATEGORIES[i:]:
                try:
                    r = nm.reciprocity(ccn, members[a], members[b])
                except ValueError:
                    r = None
                w.writerow([a.value, b.value, _fmt(r)])
    written.append(p)
    return written


def stage_predict(cfg: RunConfig) -> list[Path]:
    corpus, labels = read_corpus(cfg), read_labels(cfg)
    spec = SplitSpec(cfg.train_years, cfg.gap_years, cfg.include_rejected)
    dataset = build_dataset(corpus, labels, spec)
    if len(dataset) < 2:
        raise StageError("predict", f"only {len(dataset)} eligible authors; need at least 2")
    pdir = cfg.out / "predict"
    pdir.mkdir(parents=True, exist_ok=True)
    dpath = pdir / "dataset.csv"
    fh, w = _writer(dpath)
    with fh:
        w.writerow(["author_id", "window_start", "window_end", "label"] + list(FEATURE_NAMES))
        for fv, lab in dataset:
            w.writerow([fv.author_id, fv.window[0], fv.window[1], lab.value] + [_fmt(v) for v in fv.values])
    train, test = split_authors(dataset, cfg.test_fraction, seed=cfg.seed)
    if len({lab for _, lab in train}) < 2:
        raise StageError("predict", "training split holds a single class")
    written = [dpath]
    models = MODELS if cfg.model == "both" else (cfg.model,)
    for name in models:
        if name == "rf":
            model = train_random_forest(train, dict(trees=cfg.trees, max_depth=cfg.max_depth, seed=cfg.seed))
        else:
            model = train_gbt(train, dict(rounds=cfg.rounds, learning_rate=cfg.learning_rate,
                                          max_depth=cfg.gbt_depth, seed=cfg.seed))
        report = evaluate_dataset(model, test, FEATURE_NAMES)
        mdir = pdir / name
        mdir.mkdir(parents=True, exist_ok=True)
        written.append(save_model(model, mdir / "model.json", FEATURE_NAMES))
        written.append(write_eval_report(report, mdir / "eval_report.json"))
        written.append(write_importances_csv(report, mdir / "importances.csv"))
        logger.info("%s macro-F1 %.3f on %d held-out authors", name, report.macro_f1, len(test))
    return written


def stage_report(cfg: RunConfig) -> list[Path]:
    from .report import build_report
    return build_report(cfg.out)


STAGE_FUNCS: dict[str, Callable[[RunConfig], list[Path]]] = {
    "ingest": stage_ingest,
    "categorize": stage_categorize,
    "features": stage_features,
    "graphs": stage_graphs,
    "metrics": stage_metrics,
    "crosscat": stage_crosscat,
    "predict": stage_predict,
    "report": stage_report,
}


# -- manifest ------------------------------------------------------------------------------

def update_manifest(cfg: RunConfig, command: str, outputs: dict[str, list[Path]], fresh: bool = False) -> Path:
    """Merge this run's stage digests into ``manifest.json``."""
    path = cfg.out / "manifest.json"
    doc = {}
    if path.exists() and not fresh:
        doc = json.loads(path.read_text(encoding="utf-8"))
    doc["tool"] = "peerscope"
    doc["version"] = __version__
    doc["command"] = command
    doc["config"] = cfg.to_dict()
    if cfg.input is not None and cfg.input.is_file():
        doc["input"] = {"name": cfg.input.name, "sha256": sha256_file(cfg.input)}
    elif cfg.input is not None and cfg.input.is_dir():
        doc["input"] = {"name": cfg.input.name,
                        "sha256": {p.name: sha256_file(p) for p in sorted(cfg.input.glob("*.csv"))}}
    stages = doc.setdefault("stages", {})
    for stage, files in outputs.items():
        stages[stage] = {p.relative_to(cfg.out).as_posix(): sha256_file(p) for p in sorted(files)}
    doc["stages"] = {s: stages[s] for s in STAGES if s in stages}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def run_stages(cfg: RunConfig, stages, command: str) -> dict[str, list[Path]]:
    outputs = {}
    for stage in stages:
        logger.info("stage %s", stage)
        outputs[stage] = STAGE_FUNCS[stage](cfg)
    update_manifest(cfg, command, outputs, fresh=(command == "all"))
    return outputs
