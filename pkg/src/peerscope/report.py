"""Report bundle: summary tables and static SVG charts built from stage outputs.

Tables land in ``<out>/report``:

    acceptance.csv               category,authors,papers,pct_accepted,pct_rejected
    profile.csv                  category,citation_index,mean_experience,topic_diversity,mean_h_index,mean_team_size
    review.csv                   category,sentiment,review_length,reviewer_diversity,editor_diversity
    centrality.csv               network,kind,category,mean
    kshell_occupancy.csv         network,shell,k,authors,pct_high,pct_mid,pct_low
    mixed_team_low_minority.csv  feature,collaborated,not_collaborated
    mixed_team_low_majority.csv  feature,collaborated,not_collaborated
    prediction.csv               model,class,precision,recall,f1,pred_High,pred_Mid,pred_Low
    overlap.csv                  category,role,filter,mean_J,pct_J_06_1,pct_J_eq_1
"""
from __future__ import annotations

import csv
import json
import math
from collections import defaultdict
from pathlib import Path

from .categorizer import CATEGORIES
from .corpus import load_corpus
from .netbuild import NETWORKS
from .pipeline import MIXED_TABLES, MODELS, StageError

TABLES = {
    "acceptance.csv": ["category", "authors", "papers", "pct_accepted", "pct_rejected"],
    "profile.csv": ["category", "citation_index", "mean_experience", "topic_diversity",
                         "mean_h_index", "mean_team_size"],
    "review.csv": ["category", "sentiment", "review_length", "reviewer_diversity", "editor_diversity"],
    "centrality.csv": ["network", "kind", "category", "mean"],
    "kshell_occupancy.csv": ["network", "shell", "k", "authors", "pct_high", "pct_mid", "pct_low"],
    "mixed_team_low_minority.csv": ["feature", "collaborated", "not_collaborated"],
    "mixed_team_low_majority.csv": ["feature", "collaborated", "not_collaborated"],
    "prediction.csv": ["model", "class", "precision", "recall", "f1",
                                 "pred_High", "pred_Mid", "pred_Low"],
    "overlap.csv": ["category", "role", "filter", "mean_J", "pct_J_06_1", "pct_J_eq_1"],
}
CHARTS = ("acceptance.svg", "profile.svg", "review.svg", "centrality.svg",
          "importances.svg")


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return f"{x:.10g}" if isinstance(x, float) else str(x)


def _num(s: str) -> float | None:
    return float(s) if s != "" else None


def _mean(xs):
    xs = [x for x in xs if x is not None]
    return math.fsum(xs) / len(xs) if xs else None


def _require(out: Path, stage: str, rel: str) -> Path:
    p = out / rel
    if not p.exists():
        raise StageError(stage, f"missing output {rel}; run the '{stage}' stage before 'report'")
    return p


def _rows(path: Path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def _write(path: Path, rows: list[list]) -> Path:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TABLES[path.name])
        for r in rows:
            w.writerow([_fmt(v) for v in r])
    return path


def _table_rows(out: Path) -> dict[str, list[list]]:
    labels = {r["author_id"]: r["category"] for r in _rows(_require(out, "categorize", "categories.csv"))}
    members = defaultdict(list)
    for a, c in labels.items():
        members[c].append(a)
    tables: dict[str, list[list]] = {}

    corpus = load_corpus(_require(out, "ingest", "corpus.jsonl"))
    rows = []
    for cat in CATEGORIES:
        papers = {p.paper_id: p.accepted for a in members[cat.value] for p in corpus.papers_by_author(a)}
        n = len(papers)
        acc = sum(papers.values())
        rows.append([cat.value, len(members[cat.value]), n,
                     100.0 * acc / n if n else None, 100.0 * (n - acc) / n if n else None])
    tables["acceptance.csv"] = rows

    prof = {r["author_id"]: r for r in _rows(_require(out, "features", "profile_features.csv"))}
    rows = []
    for cat in CATEGORIES:
        fs = [prof[a] for a in members[cat.value] if a in prof]
        cites = [float(f["citation_total"]) for f in fs]
        mu = _mean(cites)
        std = math.sqrt(math.fsum((c - mu) ** 2 for c in cites) / len(cites)) if cites else None
        rows.append([cat.value, std] + [_mean([float(f[k]) for f in fs])
                                        for k in ("experience", "topic_ratio", "h_index", "team_size")])
    tables["profile.csv"] = rows

    rev = {r["author_id"]: r for r in _rows(_require(out, "features", "review_features.csv"))}
    div = {(r["category"], r["role"]): _num(r["entropy"])
           for r in _rows(_require(out, "features", "diversity.csv"))}
    rows = []
    for cat in CATEGORIES:
        fs = [rev[a] for a in members[cat.value] if a in rev]
        rows.append([cat.value, _mean([float(f["sentiment"]) for f in fs]),
                     _mean([float(f["review_length"]) for f in fs]),
                     div.get((cat.value, "reviewer")), div.get((cat.value, "editor"))])
    tables["review.csv"] = rows

    rows = []
    for net in NETWORKS:
        per = defaultdict(lambda: defaultdict(list))
        for r in _rows(_require(out, "metrics", f"metrics/{net}/metrics.csv")):
            c = labels.get(r["node"])
            if c is not None:
                per[r["kind"]][c].append(float(r["score"]))
        for kind in sorted(per):
            for cat in CATEGORIES:
                rows.append([net, kind, cat.value, _mean(per[kind][cat.value])])
    tables["centrality.csv"] = rows

    tables["kshell_occupancy.csv"] = [
        [r[k] for k in TABLES["kshell_occupancy.csv"]]
        for r in _rows(_require(out, "metrics", "metrics/shell_occupancy.csv"))]

    mixed = _rows(_require(out, "crosscat", "mixed_team.csv"))
    mixed_files = ("mixed_team_low_minority.csv", "mixed_team_low_majority.csv")
    for fname, (name, *_rest) in zip(mixed_files, MIXED_TABLES):
        tables[fname] = [[r["feature"], r["collaborated"], r["not_collaborated"]]
                         for r in mixed if r["table"] == name]

    rows = []
    for model in MODELS:
        doc = json.loads(_require(out, "predict", f"predict/{model}/eval_report.json").read_text(encoding="utf-8"))
        classes = doc["classes"]
        for i, c in enumerate(classes):
            counts = dict(zip(classes, doc["confusion_matrix"][i]))
            rows.append([model, c, doc["precision"][c], doc["recall"][c], doc["f1"][c]]
                        + [counts.get(k.value, 0) for k in CATEGORIES])
        rows.append([model, "macro", None, None, doc["macro_f1"], None, None, None])
    tables["prediction.csv"] = rows

    tables["overlap.csv"] = [
        [r[k] for k in TABLES["overlap.csv"]]
        for r in _rows(_require(out, "crosscat", "overlap_report.csv"))]
    return tables


def _charts(rdir: Path, tables: dict[str, list[list]], out: Path) -> list[Path]:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams.update({"svg.hashsalt": "peerscope", "svg.fonttype": "none", "font.size": 9})
    cats = [c.value for c in CATEGORIES]
    written = []

    def save(fig, name):
        path = rdir / name
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        written.append(path)

    def bars(ax, values, title):
        ax.bar(cats, [0.0 if v is None else float(v) for v in values], color=["#3465a4", "#cc0000", "#edd400"])
        ax.set_title(title)

    rows = tables["acceptance.csv"]
    fig, ax = plt.subplots(figsize=(4, 3))
    acc = [r[3] or 0.0 for r in rows]
    rej = [r[4] or 0.0 for r in rows]
    ax.bar(cats, acc, label="accepted", color="#4e9a06")
    ax.bar(cats, rej, bottom=acc, label="rejected", color="#a40000")
    ax.set_ylabel("% of papers")
    ax.legend()
    save(fig, "acceptance.svg")

    for fname, header, chart in (("profile.csv", TABLES["profile.csv"], "profile.svg"),
                                 ("review.csv", TABLES["review.csv"], "review.svg")):
        rows = tables[fname]
        feats = header[1:]
        fig, axes = plt.subplots(1, len(feats), figsize=(2.2 * len(feats), 2.6))
        for j, (ax, feat) in enumerate(zip(axes, feats)):
            bars(ax, [r[j + 1] for r in rows], feat)
        save(fig, chart)

    rows = tables["centrality.csv"]
    kinds = sorted({r[1] for r in rows})
    fig, axes = plt.subplots(len(NETWORKS), len(kinds), figsize=(2.2 * len(kinds), 2.2 * len(NETWORKS)),
                             squeeze=False)
    for i, net in enumerate(NETWORKS):
        for j, kind in enumerate(kinds):
            vals = {r[2]: r[3] for r in rows if r[0] == net and r[1] == kind}
            bars(axes[i][j], [vals.get(c) for c in cats], f"{net} {kind}")
    save(fig, "centrality.svg")

    fig, axes = plt.subplots(1, len(MODELS), figsize=(4 * len(MODELS), 4))
    for ax, model in zip(axes, MODELS):
        imp = _rows(out / "predict" / model / "importances.csv")[:10]
        ax.barh([r["feature"] for r in reversed(imp)], [float(r["score"]) for r in reversed(imp)])
        ax.set_title(f"{model} importances")
    save(fig, "importances.svg")
    return written


def build_report(out: str | Path) -> list[Path]:
    """Write every table and chart; raises :class:`StageError` naming a missing stage."""
    out = Path(out)
    tables = _table_rows(out)
    rdir = out / "report"
    rdir.mkdir(parents=True, exist_ok=True)
    written = [_write(rdir / name, tables[name]) for name in TABLES]
    return written + _charts(rdir, tables, out)
