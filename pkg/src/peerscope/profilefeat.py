"""Author profile features: citations, experience, topic ratio, h-index, team size."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .categorizer import Category
from .corpus import Corpus, PaperRecord


@dataclass(frozen=True)
class ProfileFeatures:
    citation_total: int
    experience: int
    topic_ratio: float
    h_index: int
    team_size: float


@dataclass(frozen=True)
class CategoryProfileSummary:
    citation_index: float
    mean_experience: float
    topic_diversity: float
    mean_h_index: float
    mean_team_size: float


def h_index(citations_per_paper: Iterable[int]) -> int:
    """Largest h such that h papers have at least h citations each."""
    ranked = sorted(citations_per_paper, reverse=True)
    h = 0
    for i, c in enumerate(ranked, start=1):
        if c >= i:
            h = i
        else:
            break
    return h


def topic_ratio(author_papers: Sequence[PaperRecord]) -> float:
    if not author_papers:
        raise ValueError("topic_ratio needs at least one paper")
    topics = set().union(*(p.topics for p in author_papers))
    return len(topics) / len(author_papers)


def team_size(author_papers: Sequence[PaperRecord]) -> float:
    if not author_papers:
        raise ValueError("team_size needs at least one paper")
    return sum(len(p.author_ids) for p in author_papers) / len(author_papers)


def author_papers(corpus: Corpus, author: str, accepted_only: bool = False) -> list[PaperRecord]:
    papers = corpus.papers_by_author(author)
    return [p for p in papers if p.accepted] if accepted_only else list(papers)


def profile_features(corpus: Corpus, author: str, *, accepted_only: bool = False,
                     citations: Mapping[str, int] | None = None) -> ProfileFeatures:
    """Profile features of one author.

    ``citations`` overrides per-paper citation counts (paper_id -> count); the
    early-career feature builder passes in-window counts here. Papers missing
    from the mapping count as 0.
    """
    papers = author_papers(corpus, author, accepted_only)
    if not papers:
        raise ValueError(f"author {author!r} has no papers in scope")
    if citations is None:
        cites = [p.citation_count for p in papers]
    else:
        cites = [citations.get(p.paper_id, 0) for p in papers]
    return ProfileFeatures(
        citation_total=sum(cites),
        experience=len(papers),
        topic_ratio=topic_ratio(papers),
        h_index=h_index(cites),
        team_size=team_size(papers),
    )


def all_profile_features(corpus: Corpus, *, accepted_only: bool = False) -> dict[str, ProfileFeatures]:
    out = {}
    for a in corpus.authors:
        papers = author_papers(corpus, a, accepted_only)
        if papers:
            out[a] = profile_features(corpus, a, accepted_only=accepted_only)
    return out


def _std(values: Sequence[float], ddof: int) -> float:
    n = len(values)
    if n - ddof <= 0:
        return 0.0
    mean = math.fsum(values) / n
    return math.sqrt(math.fsum((v - mean) ** 2 for v in values) / (n - ddof))


def category_summary(corpus: Corpus, labels: Mapping[str, Category], cat: Category, *,
                     accepted_only: bool = False, ddof: int = 0,
                     features: Mapping[str, ProfileFeatures] | None = None) -> CategoryProfileSummary:
    """Category-level profile summary.

    ``citation_index`` is the standard deviation of member citation totals
    (population by default, ``ddof=1`` for the sample estimate); the other
    fields are unweighted means over members.
    """
    members = [a for a in sorted(labels) if labels[a] == cat]
    if features is None:
        feats = [profile_features(corpus, a, accepted_only=accepted_only) for a in members
                 if author_papers(corpus, a, accepted_only)]
    else:
        feats = [features[a] for a in members if a in features]
    if not feats:
        raise ValueError(f"category {cat} has no members")
    n = len(feats)
    return CategoryProfileSummary(
        citation_index=_std([f.citation_total for f in feats], ddof),
        mean_experience=math.fsum(f.experience for f in feats) / n,
        topic_diversity=math.fsum(f.topic_ratio for f in feats) / n,
        mean_h_index=math.fsum(f.h_index for f in feats) / n,
        mean_team_size=math.fsum(f.team_size for f in feats) / n,
    )


def write_profile_csv(features: Mapping[str, ProfileFeatures], path: str | Path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["author_id", "citation_total", "experience", "topic_ratio", "h_index", "team_size"])
        for a in sorted(features):
            f = features[a]
            w.writerow([a, f.citation_total, f.experience, f"{f.topic_ratio:.10g}", f.h_index,
                        f"{f.team_size:.10g}"])
    return path
