"""Per-author yearly acceptance rates and the High / Mid / Low labelling."""
from __future__ import annotations

import csv
import enum
import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .corpus import Corpus

logger = logging.getLogger(__name__)


class Category(str, enum.Enum):
    HIGH = "High"
    MID = "Mid"
    LOW = "Low"

    def __str__(self) -> str:
        return self.value


CATEGORIES = (Category.HIGH, Category.MID, Category.LOW)


@dataclass(frozen=True)
class Thresholds:
    """Rate cut-offs (strict) and year-fraction requirements (inclusive)."""

    high_rate: float = 0.7
    high_fraction: float = 0.70
    low_rate: float = 0.4
    low_fraction: float = 0.80

    def __post_init__(self):
        for name in ("high_rate", "high_fraction", "low_rate", "low_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")


DEFAULT_THRESHOLDS = Thresholds()


@dataclass(frozen=True)
class AcceptanceSeries:
    author_id: str
    per_year: Mapping[int, float]
    career_start: int
    career_end: int

    @property
    def active_years(self) -> int:
        return len(self.per_year)

    @property
    def mean_rate(self) -> float:
        return sum(self.per_year.values()) / len(self.per_year)


def acceptance_series(corpus: Corpus, author: str) -> AcceptanceSeries:
    """Accepted/submitted ratio for every year ``author`` submitted at least once."""
    if not corpus.has_author(author):
        raise KeyError(f"author {author!r} has no submissions")
    submitted: Counter = Counter()
    accepted: Counter = Counter()
    for p in corpus.papers_by_author(author):
        submitted[p.submission_year] += 1
        accepted[p.submission_year] += p.accepted
    per_year = {y: accepted[y] / submitted[y] for y in sorted(submitted)}
    years = list(per_year)
    return AcceptanceSeries(author, per_year, years[0], years[-1])


def categorize(series: AcceptanceSeries | Mapping[int, float] | list[float],
               thresholds: Thresholds = DEFAULT_THRESHOLDS) -> Category:
    """Label an author from the rates of their active years.

    High is tested before Low; everything else is Mid.
    """
    if isinstance(series, AcceptanceSeries):
        rates = list(series.per_year.values())
    elif isinstance(series, Mapping):
        rates = list(series.values())
    else:
        rates = list(series)
    if not rates:
        raise ValueError("series has no active years")
    n = len(rates)
    # slack absorbs float error in fraction * n (e.g. 0.7 * 3)
    high_years = sum(r > thresholds.high_rate for r in rates)
    if high_years >= thresholds.high_fraction * n - 1e-12:
        return Category.HIGH
    low_years = sum(r < thresholds.low_rate for r in rates)
    if low_years >= thresholds.low_fraction * n - 1e-12:
        return Category.LOW
    return Category.MID


def categorize_all(corpus: Corpus, thresholds: Thresholds = DEFAULT_THRESHOLDS) -> dict[str, Category]:
    if len(corpus) == 0:
        raise ValueError("corpus is empty")
    labels = {a: categorize(acceptance_series(corpus, a), thresholds) for a in corpus.authors}
    counts = Counter(labels.values())
    logger.info("categories: %s", ", ".join(f"{c}={counts.get(c, 0)}" for c in CATEGORIES))
    return labels


def category_counts(labels: Mapping[str, Category]) -> dict[Category, int]:
    counts = Counter(labels.values())
    return {c: counts.get(c, 0) for c in CATEGORIES}


def write_categories_csv(corpus: Corpus, labels: Mapping[str, Category], path: str | Path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["author_id", "category", "active_years", "mean_rate"])
        for a in sorted(labels):
            s = acceptance_series(corpus, a)
            w.writerow([a, labels[a].value, s.active_years, f"{s.mean_rate:.10g}"])
    return path
