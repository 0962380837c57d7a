"""Early-career feature vectors and the temporal split.

Features of an author come only from the corpus restricted to papers
submitted up to the end of the author's training window (career years 1-3 by
default). The label is the author's full-career category; authors are
eligible once their career reaches the label year (train + gap years).
Citation counts are recomputed from in-window citing papers, since the
stored ``citation_count`` is an end-of-observation total.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .. import netmetrics as nm
from ..categorizer import Category
from ..corpus import Corpus
from ..netbuild import NETWORKS, AuthorGraph, build_network
from ..profilefeat import h_index
from ..textfeat import (EmotionLexicons, SentimentLexicon, load_emotion_lexicons, load_sentiment_lexicon,
                        load_stopwords, paper_review_features, shannon_index)

PROFILE_FEATURES = ("citation_total", "experience", "topic_ratio", "h_index", "team_size")
REVIEW_FEATURES = ("sentiment", "review_length", "reviewer_diversity", "editor_diversity", "has_reviews")
NETWORK_FEATURES = tuple(
    f"{net}_{kind}" for net in NETWORKS for kind in ("degree", "betweenness", "closeness", "pagerank", "present")
) + ("crn_core", "con_core", "ccn_reciprocity")
FEATURE_NAMES = PROFILE_FEATURES + REVIEW_FEATURES + NETWORK_FEATURES


@dataclass(frozen=True)
class SplitSpec:
    train_years: int = 3
    gap_years: int = 2
    include_rejected_reviews: bool = False

    def __post_init__(self):
        if self.train_years < 1 or self.gap_years < 0:
            raise ValueError("train_years must be >= 1 and gap_years >= 0")

    def window(self, career_start: int) -> tuple[int, int]:
        return career_start, career_start + self.train_years - 1

    def label_year(self, career_start: int) -> int:
        """First career year at which the category is predicted."""
        return career_start + self.train_years + self.gap_years - 1


@dataclass(frozen=True)
class FeatureVector:
    author_id: str
    window: tuple[int, int]
    values: tuple[float, ...]
    names: tuple[str, ...] = FEATURE_NAMES

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.values))

    def __array__(self, dtype=None):
        return np.asarray(self.values, dtype=dtype or float)


class WindowContext:
    """Graphs and node metrics of one window-restricted corpus."""

    def __init__(self, corpus: Corpus, labels: Mapping[str, Category] | None = None):
        self.corpus = corpus
        self.graphs: dict[str, AuthorGraph] = {k: build_network(k, corpus, labels) for k in NETWORKS}
        self.scores: dict[str, dict[str, Mapping[str, float]]] = {}
        for net, g in self.graphs.items():
            per = {}
            n = len(g)
            per["degree"] = nm.degree_centrality(g).scores if n >= 2 else {v: 0.0 for v in g.nodes}
            per["betweenness"] = nm.betweenness_centrality(g).scores
            per["closeness"] = nm.closeness_centrality(g).scores
            per["pagerank"] = nm.pagerank(g).scores
            per["present"] = {v: float(g.degree(v) > 0) for v in g.nodes}
            self.scores[net] = per
        self.core = {net: nm.kshell(self.graphs[net]).core for net in ("crn", "con")}
        self.reciprocity = nm.node_reciprocity(self.graphs["ccn"])
        self.citations = {pid: len(corpus.citing(pid)) for pid in corpus.paper_ids}


def _entropy_or_zero(ids: list[str]) -> float:
    return shannon_index(ids).entropy if ids else 0.0


def _features_from_context(ctx: WindowContext, author: str, first: int, spec: SplitSpec,
                           lexicon: SentimentLexicon, lexicons: EmotionLexicons,
                           stopwords: frozenset[str]) -> list[float]:
    papers = [p for p in ctx.corpus.papers_by_author(author) if p.submission_year >= first]
    if not papers:
        raise ValueError(f"author {author!r} has no papers in the training window")
    cites = [ctx.citations[p.paper_id] for p in papers]
    topics = set().union(*(p.topics for p in papers))
    values = [
        float(sum(cites)),
        float(len(papers)),
        len(topics) / len(papers),
        float(h_index(cites)),
        sum(len(p.author_ids) for p in papers) / len(papers),
    ]
    per_paper = [f for p in papers if (f := paper_review_features(p, lexicon, lexicons, stopwords)) is not None]
    scoped = [p for p in papers if p.accepted or spec.include_rejected_reviews]
    values += [
        math.fsum(f.sentiment for f in per_paper) / len(per_paper) if per_paper else 0.0,
        math.fsum(f.length for f in per_paper) / len(per_paper) if per_paper else 0.0,
        _entropy_or_zero([r for p in scoped for r in p.reviewer_ids()]),
        _entropy_or_zero([e for p in scoped for e in p.editor_ids()]),
        float(bool(per_paper)),
    ]
    for net in NETWORKS:
        s = ctx.scores[net]
        values += [s[k].get(author, 0.0) for k in ("degree", "betweenness", "closeness", "pagerank", "present")]
    values += [float(ctx.core["crn"].get(author, 0)), float(ctx.core["con"].get(author, 0)),
               ctx.reciprocity.get(author, 0.0)]
    return values


def build_features(corpus: Corpus, labels: Mapping[str, Category] | None, author: str,
                   spec: SplitSpec = SplitSpec(), *, context_cache: dict | None = None,
                   lexicon: SentimentLexicon | None = None, lexicons: EmotionLexicons | None = None,
                   stopwords: Iterable[str] | None = None) -> FeatureVector:
    """Feature vector of ``author`` over the first ``spec.train_years`` career years.

    ``labels`` only tag graph nodes; no feature reads them. ``context_cache``
    shares window graphs between authors whose windows end in the same year.
    """
    if not corpus.has_author(author):
        raise KeyError(f"unknown author {author!r}")
    start, _ = corpus.career_span(author)
    first, last = spec.window(start)
    if context_cache is not None and last in context_cache:
        ctx = context_cache[last]
    else:
        ctx = WindowContext(corpus.window(last), labels)
        if context_cache is not None:
            context_cache[last] = ctx
    values = _features_from_context(
        ctx, author, first, spec,
        lexicon or load_sentiment_lexicon(), lexicons or load_emotion_lexicons(),
        load_stopwords() if stopwords is None else frozenset(stopwords))
    return FeatureVector(author, (first, last), tuple(float(v) for v in values))


def eligible_authors(corpus: Corpus, spec: SplitSpec = SplitSpec()) -> list[str]:
    """Authors whose career reaches the label year."""
    out = []
    for a in corpus.authors:
        start, end = corpus.career_span(a)
        if end >= spec.label_year(start):
            out.append(a)
    return out


def build_dataset(corpus: Corpus, labels: Mapping[str, Category], spec: SplitSpec = SplitSpec(),
                  authors: Sequence[str] | None = None) -> list[tuple[FeatureVector, Category]]:
    authors = eligible_authors(corpus, spec) if authors is None else list(authors)
    cache: dict = {}
    lex, emo, stop = load_sentiment_lexicon(), load_emotion_lexicons(), load_stopwords()
    return [(build_features(corpus, labels, a, spec, context_cache=cache, lexicon=lex, lexicons=emo,
                            stopwords=stop), labels[a]) for a in authors]


def as_xy(dataset: Sequence[tuple]) -> tuple[np.ndarray, list]:
    """Stack ``(FeatureVector or array-like, label)`` pairs into ``(X, y)``."""
    if not dataset:
        raise ValueError("dataset is empty")
    X = np.asarray([np.asarray(v, dtype=float) for v, _ in dataset], dtype=float)
    return X, [lab for _, lab in dataset]


def split_authors(dataset: Sequence[tuple], test_fraction: float = 0.3, seed: int = 0):
    """Random held-out-author split; returns ``(train, test)``."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must lie in (0, 1)")
    order = list(range(len(dataset)))
    random.Random(seed).shuffle(order)
    n_test = max(1, int(round(test_fraction * len(dataset))))
    test_idx = set(order[:n_test])
    train = [d for i, d in enumerate(dataset) if i not in test_idx]
    test = [d for i, d in enumerate(dataset) if i in test_idx]
    return train, test
