"""Review-text features and Shannon diversity of reviewer / editor assignment."""
from __future__ import annotations

import csv
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Hashable, Iterable, Mapping, Sequence

from .categorizer import Category
from .corpus import Corpus, PaperRecord

EMOTIONS = ("positive", "optimism", "cheerfulness", "confusion", "contentment")
ROLES = ("reviewer", "editor")

_TOKEN = re.compile(r"[^\W_]+")


def tokenize(text: str) -> list[str]:
    """Lowercase and split on runs of non-alphanumeric characters."""
    return _TOKEN.findall(text.lower())


@dataclass(frozen=True)
class SentimentLexicon:
    polarity: Mapping[str, float]
    name: str = "custom"

    def __post_init__(self):
        if not self.polarity:
            raise ValueError("sentiment lexicon is empty")
        for tok, val in self.polarity.items():
            if not -1.0 <= val <= 1.0:
                raise ValueError(f"polarity of {tok!r} outside [-1, 1]: {val}")
            if tokenize(tok) != [tok]:
                raise ValueError(f"lexicon token {tok!r} is not in normalized form")


@dataclass(frozen=True)
class EmotionLexicons:
    sets: Mapping[str, frozenset[str]]

    def __post_init__(self):
        for emo in EMOTIONS:
            if not self.sets.get(emo):
                raise ValueError(f"emotion lexicon {emo!r} is missing or empty")


@dataclass(frozen=True)
class ReviewFeatures:
    sentiment: float
    length: float
    lqi: Mapping[str, float]


@dataclass(frozen=True)
class DiversityIndex:
    entropy: float
    support: int
    total: int
    counts: Mapping[Hashable, int] = field(repr=False)


# -- lexicon files ------------------------------------------------------

def load_sentiment_lexicon(path: str | Path | None = None) -> SentimentLexicon:
    """Read a ``token,polarity`` CSV; the bundled lexicon when ``path`` is None."""
    if path is None:
        text = resources.files("peerscope.data").joinpath("sentiment_lexicon.csv").read_text("utf-8")
        name = "bundled"
    else:
        text = Path(path).read_text("utf-8")
        name = Path(path).stem
    rows = csv.DictReader(text.splitlines())
    return SentimentLexicon({r["token"].strip().lower(): float(r["polarity"]) for r in rows}, name=name)


def load_emotion_lexicons(path: str | Path | None = None) -> EmotionLexicons:
    if path is None:
        text = resources.files("peerscope.data").joinpath("emotion_lexicon.csv").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    sets: dict[str, set[str]] = {}
    for r in csv.DictReader(text.splitlines()):
        sets.setdefault(r["emotion"].strip(), set()).add(r["token"].strip().lower())
    return EmotionLexicons({k: frozenset(v) for k, v in sets.items()})


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    if path is None:
        text = resources.files("peerscope.data").joinpath("stopwords.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    return frozenset(line.strip().lower() for line in text.splitlines() if line.strip())


# -- per-text features ----------------------------------------------------

def sentiment(text: str, lexicon: SentimentLexicon) -> float:
    """Mean polarity of the tokens found in the lexicon (0.0 if none match)."""
    hits = [lexicon.polarity[t] for t in tokenize(text) if t in lexicon.polarity]
    return math.fsum(hits) / len(hits) if hits else 0.0


def review_length(text: str, stopwords: Iterable[str]) -> int:
    stop = stopwords if isinstance(stopwords, (set, frozenset)) else set(stopwords)
    return sum(1 for t in tokenize(text) if t not in stop)


def lqi(text: str, lexicons: EmotionLexicons) -> dict[str, float]:
    """Per-emotion fraction of tokens that appear in that emotion's lexicon."""
    tokens = tokenize(text)
    if not tokens:
        return {e: 0.0 for e in EMOTIONS}
    return {e: sum(t in lexicons.sets[e] for t in tokens) / len(tokens) for e in EMOTIONS}


# -- diversity ------------------------------------------------------------

def shannon_index(occurrences: Iterable[Hashable], base: float | None = None) -> DiversityIndex:
    """Shannon entropy of an id multiset, natural log unless ``base`` is given."""
    counts = Counter(occurrences)
    if not counts:
        raise ValueError("shannon_index needs at least one occurrence")
    n = sum(counts.values())
    # sorted counts make the float sum independent of input order
    h = -math.fsum((f / n) * math.log(f / n) for f in sorted(counts.values()))
    h = h if h > 0.0 else 0.0
    if base is not None:
        h /= math.log(base)
    return DiversityIndex(entropy=h, support=len(counts), total=n, counts=dict(counts))


def _role_ids(paper: PaperRecord, role: str) -> list[str]:
    if role == "reviewer":
        return paper.reviewer_ids()
    if role == "editor":
        return paper.editor_ids()
    raise ValueError(f"role must be one of {ROLES}, got {role!r}")


def role_occurrences(corpus: Corpus, authors: Iterable[str], role: str, *,
                     include_rejected: bool = False) -> list[str]:
    """Global id list: one entry per (author, paper, round, id) incidence."""
    out: list[str] = []
    for a in authors:
        for p in corpus.papers_by_author(a):
            if p.accepted or include_rejected:
                out.extend(_role_ids(p, role))
    return out


def category_diversity(corpus: Corpus, labels: Mapping[str, Category], cat: Category, role: str, *,
                       include_rejected: bool = False, base: float | None = None) -> DiversityIndex:
    members = [a for a in sorted(labels) if labels[a] == cat and corpus.has_author(a)]
    occ = role_occurrences(corpus, members, role, include_rejected=include_rejected)
    if not occ:
        raise ValueError(f"category {cat} has no {role} data on papers in scope")
    return shannon_index(occ, base=base)


def author_diversity(corpus: Corpus, author: str, role: str, *,
                     include_rejected: bool = False, base: float | None = None) -> DiversityIndex:
    """Entropy of one author's own reviewer (or editor) list."""
    occ = role_occurrences(corpus, [author], role, include_rejected=include_rejected)
    if not occ:
        raise ValueError(f"author {author!r} has no {role} data on papers in scope")
    return shannon_index(occ, base=base)


# -- per-author review features -------------------------------------------

def paper_review_features(paper: PaperRecord, lexicon: SentimentLexicon, lexicons: EmotionLexicons,
                          stopwords: Iterable[str]) -> ReviewFeatures | None:
    """Mean over every review text of every round; None when the paper has none."""
    texts = paper.review_texts()
    if not texts:
        return None
    stop = frozenset(stopwords)
    n = len(texts)
    per_text = [lqi(t, lexicons) for t in texts]
    return ReviewFeatures(
        sentiment=math.fsum(sentiment(t, lexicon) for t in texts) / n,
        length=sum(review_length(t, stop) for t in texts) / n,
        lqi={e: math.fsum(d[e] for d in per_text) / n for e in EMOTIONS},
    )


def author_review_features(corpus: Corpus, author: str, lexicon: SentimentLexicon | None = None,
                           lexicons: EmotionLexicons | None = None,
                           stopwords: Iterable[str] | None = None) -> ReviewFeatures:
    """Per-paper review features averaged over the author's papers with review text."""
    lexicon = lexicon or load_sentiment_lexicon()
    lexicons = lexicons or load_emotion_lexicons()
    stopwords = load_stopwords() if stopwords is None else frozenset(stopwords)
    per_paper = [f for p in corpus.papers_by_author(author)
                 if (f := paper_review_features(p, lexicon, lexicons, stopwords)) is not None]
    if not per_paper:
        raise ValueError(f"author {author!r} has no review text")
    return average_review_features(per_paper)


def average_review_features(items: Sequence[ReviewFeatures]) -> ReviewFeatures:
    n = len(items)
    return ReviewFeatures(
        sentiment=math.fsum(f.sentiment for f in items) / n,
        length=math.fsum(f.length for f in items) / n,
        lqi={e: math.fsum(f.lqi[e] for f in items) / n for e in EMOTIONS},
    )
