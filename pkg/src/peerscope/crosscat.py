"""Category-level interaction analytics.

Edge transitions between categories, citation uplift, mixed-team comparisons
and the Jaccard overlap audit of reviewer / editor assignment.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .categorizer import CATEGORIES, Category
from .corpus import Corpus, PaperRecord
from .netbuild import AuthorGraph
from .textfeat import SentimentLexicon, load_sentiment_lexicon, sentiment

PAIR_FILTERS = ("all", "never_collaborated", "cross_category")


# -- edge transitions ----------------------------------------------------------

@dataclass(frozen=True)
class ClassEdgeMatrix:
    """Edge counts between categories, rows/cols in High, Mid, Low order.

    Directed graphs fill the full matrix (row = source category). Undirected
    graphs store each unordered category pair once, in the upper triangle, so
    counts always sum to the edge total; :meth:`pair` reads either orientation.
    """

    counts: np.ndarray
    directed: bool

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def fractions(self) -> np.ndarray:
        return self.counts / self.total

    def pair(self, a: Category, b: Category) -> int:
        i, j = CATEGORIES.index(a), CATEGORIES.index(b)
        if self.directed:
            return int(self.counts[i, j])
        i, j = min(i, j), max(i, j)
        return int(self.counts[i, j])

    def symmetric(self) -> np.ndarray:
        """Undirected view with each off-diagonal count mirrored."""
        if self.directed:
            return self.counts + self.counts.T - np.diag(np.diag(self.counts))
        return self.counts + np.triu(self.counts, 1).T


def class_edge_matrix(g: AuthorGraph, labels: Mapping[str, Category] | None = None) -> ClassEdgeMatrix:
    labels = g.labels if labels is None else labels
    if g.n_edges == 0:
        raise ValueError("graph has no edges")
    counts = np.zeros((3, 3), dtype=np.int64)
    for u, v in g.edges:
        cu, cv = labels.get(u), labels.get(v)
        if cu is None or cv is None:
            raise ValueError(f"unlabelled node on edge ({u!r}, {v!r})")
        i, j = CATEGORIES.index(cu), CATEGORIES.index(cv)
        if not g.directed and i > j:
            i, j = j, i
        counts[i, j] += 1
    return ClassEdgeMatrix(counts, g.directed)


# -- citation uplift -----------------------------------------------------------

def _members(labels: Mapping[str, Category], cat: Category) -> set[str]:
    return {a for a, c in labels.items() if c == cat}


def citation_uplift(corpus: Corpus, labels: Mapping[str, Category], source_cat: Category,
                    target_cat: Category) -> tuple[float | None, float | None]:
    """Mean citation_count of target-category papers cited vs. never cited by
    a source-category author. An empty partition gives ``None``."""
    src, tgt = _members(labels, source_cat), _members(labels, target_cat)
    if not src or not tgt:
        raise ValueError("both categories need members")
    cited, uncited = [], []
    for p in corpus:
        if not any(a in tgt for a in p.author_ids):
            continue
        hit = any(a in src for q in corpus.citing(p.paper_id) for a in corpus.paper(q).author_ids)
        (cited if hit else uncited).append(p.citation_count)
    mean = lambda xs: math.fsum(xs) / len(xs) if xs else None  # noqa: E731
    return mean(cited), mean(uncited)


# -- mixed teams ---------------------------------------------------------------

MIXED_FEATURES = ("mean_papers", "team_size", "citation", "review_sentiment")


@dataclass(frozen=True)
class MixedTeamReport:
    minority_cat: Category
    majority_cat: Category
    focus_cat: Category
    minority_share: float
    qualifying_papers: tuple[str, ...]
    focus_authors: tuple[str, ...]
    collaborated: Mapping[str, float | None] = field(default_factory=dict)
    not_collaborated: Mapping[str, float | None] = field(default_factory=dict)

    @property
    def empty(self) -> bool:
        return not self.qualifying_papers


def composition_matches(n_authors: int, n_minority: int, share: float,
                        tolerance: float | None = None) -> bool:
    """Does a team of ``n_authors`` with ``n_minority`` minority members match ``share``?

    ``tolerance=None``: the exact split when share * n is an integer, otherwise
    the nearest integer split (at most one author off). A numeric tolerance
    accepts any split within that many authors of share * n.
    """
    if not 1 <= n_minority <= n_authors - 1:
        return False
    target = Fraction(share).limit_denominator(10_000) * n_authors
    if tolerance is None:
        if target.denominator == 1:
            return n_minority == target
        nearest = math.floor(target + Fraction(1, 2))
        return n_minority == nearest and abs(n_minority - target) <= 1
    return abs(n_minority - target) <= Fraction(tolerance).limit_denominator(10_000)


def _condition_features(corpus: Corpus, authors: Sequence[str], papers_of: Mapping[str, list[PaperRecord]],
                        lexicon: SentimentLexicon) -> dict[str, float | None]:
    used = [a for a in authors if papers_of.get(a)]
    if not used:
        return {k: None for k in MIXED_FEATURES}
    n_papers, sizes, cites, sents = [], [], [], []
    for a in used:
        ps = papers_of[a]
        n_papers.append(len(ps))
        sizes.append(math.fsum(len(p.author_ids) for p in ps) / len(ps))
        cites.append(sum(p.citation_count for p in ps))
        per_paper = [math.fsum(sentiment(t, lexicon) for t in p.review_texts()) / len(p.review_texts())
                     for p in ps if p.review_texts()]
        if per_paper:
            sents.append(math.fsum(per_paper) / len(per_paper))
    n = len(used)
    return {
        "mean_papers": math.fsum(n_papers) / n,
        "team_size": math.fsum(sizes) / n,
        "citation": math.fsum(cites) / n,
        "review_sentiment": math.fsum(sents) / len(sents) if sents else None,
    }


def mixed_team_report(corpus: Corpus, labels: Mapping[str, Category], minority_cat: Category,
                      majority_cat: Category, minority_share: float, *, focus_cat: Category | None = None,
                      tolerance: float | None = None,
                      lexicon: SentimentLexicon | None = None) -> MixedTeamReport:
    """Compare focus-category authors on mixed papers with their other papers.

    A qualifying paper has only minority- and majority-category authors, with
    the minority share matched by :func:`composition_matches`. Focus authors
    (the minority category unless ``focus_cat`` says otherwise) that appear on
    a qualifying paper are measured twice: over their qualifying papers
    ("collaborated") and over their papers without any author of the other
    category ("not collaborated").
    """
    if not 0.0 < minority_share < 1.0:
        raise ValueError("minority_share must lie in (0, 1)")
    focus_cat = minority_cat if focus_cat is None else focus_cat
    if focus_cat not in (minority_cat, majority_cat):
        raise ValueError("focus_cat must be the minority or the majority category")
    other_cat = majority_cat if focus_cat == minority_cat else minority_cat
    lexicon = lexicon or load_sentiment_lexicon()

    qualifying = []
    for p in corpus:
        cats = [labels.get(a) for a in p.author_ids]
        if any(c not in (minority_cat, majority_cat) for c in cats):
            continue
        if composition_matches(len(cats), sum(c == minority_cat for c in cats), minority_share, tolerance):
            qualifying.append(p)
    focus = sorted({a for p in qualifying for a in p.author_ids if labels.get(a) == focus_cat})
    with_other = {a: [p for p in qualifying if a in p.author_ids] for a in focus}
    without_other = {a: [p for p in corpus.papers_by_author(a)
                         if all(labels.get(b) != other_cat for b in p.author_ids)] for a in focus}
    return MixedTeamReport(
        minority_cat=minority_cat, majority_cat=majority_cat, focus_cat=focus_cat,
        minority_share=minority_share,
        qualifying_papers=tuple(p.paper_id for p in qualifying),
        focus_authors=tuple(focus),
        collaborated=_condition_features(corpus, focus, with_other, lexicon),
        not_collaborated=_condition_features(corpus, focus, without_other, lexicon),
    )


# -- assignment overlap ----------------------------------------------------------

@dataclass(frozen=True)
class OverlapReport:
    role: str
    pair_filter: str
    categories: tuple[Category, ...]
    n_pairs: int
    mean_j: float | None
    pct_j_06_1: float | None
    pct_j_eq_1: float | None

    @property
    def label(self) -> str:
        return "-".join(c.value for c in self.categories)


def jaccard(a: set, b: set) -> float:
    union = a | b
    if not union:
        raise ValueError("jaccard of two empty sets is undefined")
    return len(a & b) / len(union)


def role_sets(corpus: Corpus, authors, role: str) -> dict[str, frozenset[str]]:
    """Deduplicated reviewer/editor ids over each author's papers (both decisions)."""
    out = {}
    for a in authors:
        ids: set[str] = set()
        for p in corpus.papers_by_author(a):
            ids.update(p.reviewer_ids() if role == "reviewer" else p.editor_ids())
        if ids:
            out[a] = frozenset(ids)
    return out


def _incidence(sets: Mapping[str, frozenset[str]], vocab: Mapping[str, int]) -> np.ndarray:
    m = np.zeros((len(sets), len(vocab)), dtype=np.int64)
    for i, s in enumerate(sets.values()):
        m[i, [vocab[x] for x in s]] = 1
    return m


def _pairwise_j(left: Mapping[str, frozenset[str]], right: Mapping[str, frozenset[str]] | None) -> np.ndarray:
    """J for all pairs: upper triangle when ``right`` is None, else the full cross block."""
    vocab = {x: i for i, x in enumerate(sorted(set().union(*left.values(), *(right or {}).values())))}
    a = _incidence(left, vocab)
    b = a if right is None else _incidence(right, vocab)
    inter = a @ b.T
    union = a.sum(1)[:, None] + b.sum(1)[None, :] - inter
    j = inter / union
    if right is None:
        return j[np.triu_indices(len(left), 1)]
    return j.ravel()


def _coauthors(corpus: Corpus) -> set[tuple[str, str]]:
    pairs = set()
    for p in corpus:
        ids = sorted(p.author_ids)
        for i, a in enumerate(ids):
            for b in ids[i + 1:]:
                pairs.add((a, b))
    return pairs


def assignment_overlap(corpus: Corpus, labels: Mapping[str, Category], role: str, pair_filter: str = "all",
                       cat: Category | None = None, cat_b: Category | None = None) -> OverlapReport:
    """Mean pairwise Jaccard overlap of reviewer (or editor) sets.

    ``pair_filter`` is ``"all"`` or ``"never_collaborated"`` (pairs within
    ``cat``) or ``"cross_category"`` (one author from ``cat``, one from
    ``cat_b``). Bucket shares are percentages of pairs with J in [0.6, 1] and
    with J == 1.
    """
    if role not in ("reviewer", "editor"):
        raise ValueError(f"role must be 'reviewer' or 'editor', got {role!r}")
    if pair_filter not in PAIR_FILTERS:
        raise ValueError(f"pair_filter must be one of {PAIR_FILTERS}")
    if cat is None:
        raise ValueError("cat is required")
    sets_a = role_sets(corpus, sorted(_members(labels, cat)), role)
    if pair_filter == "cross_category":
        if cat_b is None or cat_b == cat:
            raise ValueError("cross_category needs a second, different category")
        sets_b = role_sets(corpus, sorted(_members(labels, cat_b)), role)
        if not sets_a or not sets_b:
            raise ValueError("both categories need an author with the role populated")
        js = _pairwise_j(sets_a, sets_b)
        cats = (cat, cat_b)
    else:
        if len(sets_a) < 2:
            raise ValueError(f"category {cat} has fewer than 2 authors with {role} data")
        js = _pairwise_j(sets_a, None)
        if pair_filter == "never_collaborated":
            collab = _coauthors(corpus)
            names = list(sets_a)
            iu, ju = np.triu_indices(len(names), 1)
            keep = np.array([(names[i], names[j]) not in collab for i, j in zip(iu, ju)], dtype=bool)
            js = js[keep] if len(js) else js
        cats = (cat,)
    n = int(js.size)
    if n == 0:
        return OverlapReport(role, pair_filter, cats, 0, None, None, None)
    return OverlapReport(
        role=role, pair_filter=pair_filter, categories=cats, n_pairs=n,
        mean_j=math.fsum(js.tolist()) / n,
        pct_j_06_1=100.0 * int(np.count_nonzero(js >= 0.6)) / n,
        pct_j_eq_1=100.0 * int(np.count_nonzero(js == 1.0)) / n,
    )


# -- writers ----------------------------------------------------------------------

def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return f"{x:.10g}" if isinstance(x, float) else str(x)


def write_edge_matrix_csv(matrices: Mapping[str, ClassEdgeMatrix], path: str | Path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["network", "src_category", "dst_category", "edges", "fraction"])
        for name, m in matrices.items():
            frac = m.fractions
            for i, a in enumerate(CATEGORIES):
                for j, b in enumerate(CATEGORIES):
                    if not m.directed and j < i:
                        continue
                    w.writerow([name, a.value, b.value, int(m.counts[i, j]), _fmt(float(frac[i, j]))])
    return path


def write_overlap_csv(reports: Sequence[OverlapReport], path: str | Path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["category", "role", "filter", "mean_J", "pct_J_06_1", "pct_J_eq_1"])
        for r in reports:
            w.writerow([r.label, r.role, r.pair_filter, _fmt(r.mean_j), _fmt(r.pct_j_06_1), _fmt(r.pct_j_eq_1)])
    return path


def write_mixed_team_csv(reports: Mapping[str, MixedTeamReport], path: str | Path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["table", "feature", "collaborated", "not_collaborated"])
        for name, r in reports.items():
            for feat in MIXED_FEATURES:
                w.writerow([name, feat, _fmt(r.collaborated.get(feat)), _fmt(r.not_collaborated.get(feat))])
    return path
