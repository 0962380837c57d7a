"""Seeded synthetic corpora with planted author categories.

Authors are created in three intent groups (High, Mid, Low) with their own
acceptance probability, team size, topic breadth and review tone. Papers of a
group can be routed to a dedicated reviewer / editor subpool with a
per-group probability (``concentration_*``), which lowers that group's
reviewer and editor diversity and raises its assignment overlap. Citation
targets are drawn with group-to-group preference weights.

The output is a pure function of :class:`SynthConfig`.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .categorizer import CATEGORIES, Category
from .corpus import ACCEPTED, REJECTED, Corpus, PaperRecord, ReviewRound

POSITIVE_SNIPPETS = (
    "The results are excellent and clearly presented.",
    "This is a novel and interesting contribution to the field.",
    "The analysis is rigorous, thorough and convincing.",
    "I enjoyed reading this elegant and well organized manuscript.",
    "The calculations are correct and the conclusions are sound.",
    "A valuable, original study with strong and impressive results.",
    "The approach is promising and opens an encouraging future direction.",
    "I am pleased to recommend the paper for publication.",
    "The presentation is satisfactory and the discussion is comprehensive.",
    "The authors provide a careful and insightful treatment of the problem.",
    "This is a remarkable and useful result with great potential.",
    "The numerical checks are robust and consistent with previous work.",
)
NEGATIVE_SNIPPETS = (
    "The main argument is unclear and the derivation is confusing.",
    "Unfortunately the analysis is flawed and contains several errors.",
    "The results are weak and the claims are unsupported.",
    "The presentation is sloppy and the notation is vague.",
    "The contribution appears trivial and largely redundant.",
    "Important references are missing and the discussion is superficial.",
    "The conclusions are misleading and the method is questionable.",
    "The manuscript is incomplete and lacks a convincing test.",
    "Several statements are incorrect and the approach fails in general.",
    "The motivation is obscure and the structure is puzzling.",
    "The comparison is inadequate and the numerical work is careless.",
    "I have serious concerns about the consistency of the argument.",
)
NEUTRAL_SNIPPETS = (
    "The authors study the model in the limit of large coupling.",
    "Section two reviews the setup and section three gives the computation.",
    "The appendix collects the technical details of the expansion.",
    "The paper considers corrections at next to leading order.",
    "Figures show the dependence on the cutoff parameter.",
    "The authors compare with lattice data and earlier estimates.",
)


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 7
    n_high: int = 10
    n_mid: int = 10
    n_low: int = 10
    first_year: int = 2000
    n_years: int = 12
    max_start_offset: int = 3
    papers_per_year: int = 4
    accept_high: float = 0.9
    accept_mid: float = 0.55
    accept_low: float = 0.15
    extra_authors_high: float = 1.4
    extra_authors_mid: float = 1.1
    extra_authors_low: float = 0.6
    homophily: float = 0.9
    n_topics: int = 24
    topics_high: int = 2
    topics_mid: int = 4
    topics_low: int = 7
    reviewer_pool: int = 1500
    reviewers_per_paper: int = 2
    dedicated_reviewers_high: int = 4
    dedicated_reviewers_mid: int = 8
    editor_pool: int = 150
    dedicated_editors_high: int = 1
    dedicated_editors_mid: int = 2
    concentration_high: float = 0.6
    concentration_mid: float = 0.2
    concentration_low: float = 0.0
    max_rounds: int = 2
    cites_per_paper: int = 2
    cite_high_high: float = 0.6
    cite_high_mid: float = 0.3
    cite_high_low: float = 0.1
    cite_mid_high: float = 0.45
    cite_mid_mid: float = 0.4
    cite_mid_low: float = 0.15
    cite_low_high: float = 0.35
    cite_low_mid: float = 0.35
    cite_low_low: float = 0.3
    positivity_high: float = 0.8
    positivity_mid: float = 0.5
    positivity_low: float = 0.2
    citation_scale_high: float = 40.0
    citation_scale_mid: float = 25.0
    citation_scale_low: float = 12.0
    citation_tail: float = 1.8

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name.startswith(("accept_", "concentration_", "positivity_")) or f.name == "homophily":
                if not 0.0 <= v <= 1.0:
                    raise ValueError(f"{f.name} must lie in [0, 1], got {v}")
            elif f.name.startswith("cite_") or f.name.startswith("extra_authors_") \
                    or f.name.startswith("citation_scale_"):
                if v < 0:
                    raise ValueError(f"{f.name} must be non-negative, got {v}")
        if min(self.n_high, self.n_mid, self.n_low) < 0 or self.n_high + self.n_mid + self.n_low < 1:
            raise ValueError("need at least one author and no negative group sizes")
        if self.n_years < 1 or self.papers_per_year < 1 or self.max_start_offset < 0:
            raise ValueError("n_years and papers_per_year must be >= 1, max_start_offset >= 0")
        if self.reviewer_pool < 1 or self.editor_pool < 1:
            raise ValueError("reviewer_pool and editor_pool must be at least 1")
        if self.reviewers_per_paper < 1 or self.reviewers_per_paper > self.reviewer_pool:
            raise ValueError("reviewers_per_paper must lie in [1, reviewer_pool]")
        if self.max_rounds < 1 or self.cites_per_paper < 0 or self.citation_tail <= 0:
            raise ValueError("max_rounds >= 1, cites_per_paper >= 0 and citation_tail > 0 required")
        for cat in ("high", "mid"):
            for kind in ("reviewers", "editors"):
                if getattr(self, f"dedicated_{kind}_{cat}") < 1 and getattr(self, f"concentration_{cat}") > 0:
                    raise ValueError(f"concentration_{cat} > 0 needs dedicated_{kind}_{cat} >= 1")
        if self.n_topics < max(self.topics_high, self.topics_mid, self.topics_low, 1):
            raise ValueError("n_topics must cover every group's topic breadth")

    # per-category views
    def group(self, name: str, cat: Category):
        return getattr(self, f"{name}_{cat.value.lower()}")

    def cite_weights(self, src: Category) -> np.ndarray:
        return np.array([getattr(self, f"cite_{src.value.lower()}_{t.value.lower()}") for t in CATEGORIES])

    @classmethod
    def from_text(cls, text: str) -> "SynthConfig":
        """Parse ``key = value`` lines (an optional ``[synth]`` header is allowed)."""
        parser = configparser.ConfigParser()
        body = text if text.lstrip().startswith("[") else "[synth]\n" + text
        parser.read_string(body)
        section = parser[parser.sections()[0]]
        types = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, raw in section.items():
            if key not in types:
                raise ValueError(f"unknown synth config key {key!r}")
            kwargs[key] = int(raw) if types[key] in ("int", int) else float(raw)
        return cls(**kwargs)

    def to_text(self) -> str:
        return "".join(f"{f.name} = {getattr(self, f.name)}\n" for f in fields(self))


def load_config(path: str | Path) -> SynthConfig:
    return SynthConfig.from_text(Path(path).read_text(encoding="utf-8"))


def planted_labels(config: SynthConfig) -> dict[str, Category]:
    """Intended category of every generated author id."""
    out = {}
    i = 0
    for cat, n in zip(CATEGORIES, (config.n_high, config.n_mid, config.n_low)):
        for _ in range(n):
            out[f"a{i:04d}"] = cat
            i += 1
    return out


def _review_text(rng: np.random.Generator, positivity: float, n_snippets: int) -> str:
    parts = []
    for _ in range(n_snippets):
        u = rng.random()
        if u < 0.15:
            parts.append(NEUTRAL_SNIPPETS[rng.integers(len(NEUTRAL_SNIPPETS))])
        elif rng.random() < positivity:
            parts.append(POSITIVE_SNIPPETS[rng.integers(len(POSITIVE_SNIPPETS))])
        else:
            parts.append(NEGATIVE_SNIPPETS[rng.integers(len(NEGATIVE_SNIPPETS))])
    return " ".join(parts)


_SNIPPETS = {Category.HIGH: (5, 9), Category.MID: (4, 7), Category.LOW: (3, 5)}


def generate(config: SynthConfig = SynthConfig()) -> Corpus:
    """Build a corpus from ``config``; identical configs give identical corpora."""
    c = config
    root = np.random.SeedSequence(c.seed)
    rng_authors, rng_papers, rng_assign, rng_text, rng_cite = (np.random.default_rng(s) for s in root.spawn(5))

    labels = planted_labels(c)
    authors = list(labels)
    by_cat = {cat: [a for a in authors if labels[a] == cat] for cat in CATEGORIES}
    topics = [f"topic-{i:02d}" for i in range(c.n_topics)]
    start = {a: c.first_year + int(rng_authors.integers(0, c.max_start_offset + 1)) for a in authors}
    focus = {a: [topics[i] for i in rng_authors.choice(c.n_topics, c.group("topics", labels[a]), replace=False)]
             for a in authors}

    general_reviewers = [f"r{i:04d}" for i in range(c.reviewer_pool)]
    general_editors = [f"e{i:03d}" for i in range(c.editor_pool)]
    dedicated = {
        Category.HIGH: ([f"rh{i:03d}" for i in range(c.dedicated_reviewers_high)],
                        [f"eh{i:02d}" for i in range(c.dedicated_editors_high)]),
        Category.MID: ([f"rm{i:03d}" for i in range(c.dedicated_reviewers_mid)],
                       [f"em{i:02d}" for i in range(c.dedicated_editors_mid)]),
    }

    # -- paper skeletons ------------------------------------------------------
    drafts = []
    last_year = c.first_year + c.n_years - 1
    for year in range(c.first_year, last_year + 1):
        for lead in authors:
            if year < start[lead]:
                continue
            cat = labels[lead]
            for _ in range(c.papers_per_year):
                n_extra = int(rng_papers.poisson(c.group("extra_authors", cat)))
                team = [lead]
                for _ in range(n_extra):
                    active = [a for a in (by_cat[cat] if rng_papers.random() < c.homophily else authors)
                              if start[a] <= year and a not in team]
                    if active:
                        team.append(active[int(rng_papers.integers(len(active)))])
                k = 1 + int(rng_papers.integers(0, min(2, len(focus[lead]))))
                paper_topics = [focus[lead][i] for i in rng_papers.choice(len(focus[lead]), k, replace=False)]
                p_acc = math.fsum(c.group("accept", labels[a]) for a in team) / len(team)
                accepted = bool(rng_papers.random() < p_acc)
                drafts.append(dict(year=year, lead=lead, team=team, topics=paper_topics, accepted=accepted))
    ids = [f"p{i:05d}" for i in range(len(drafts))]

    # -- review assignment and texts ----------------------------------------------
    rounds_of = []
    for d in drafts:
        cat = labels[d["lead"]]
        route = rng_assign.random()
        pick_r = rng_assign.random(c.reviewers_per_paper)
        pick_e = rng_assign.random()
        n_rounds = 1 + (int(rng_assign.integers(0, c.max_rounds)) if d["accepted"] else 0)
        if cat in dedicated and route < c.group("concentration", cat):
            rpool, epool = dedicated[cat]
        else:
            rpool, epool = general_reviewers, general_editors
        reviewers: list[str] = []
        for u in pick_r:
            choices = [r for r in rpool if r not in reviewers] or rpool
            r = choices[min(int(u * len(choices)), len(choices) - 1)]
            if r not in reviewers:
                reviewers.append(r)
        editor = epool[min(int(pick_e * len(epool)), len(epool) - 1)]
        positivity = math.fsum(c.group("positivity", labels[a]) for a in d["team"]) / len(d["team"])
        positivity = 0.7 * positivity + 0.3 * (0.8 if d["accepted"] else 0.2)
        lo, hi = _SNIPPETS[cat]
        rounds = []
        for ri in range(1, n_rounds + 1):
            texts = [_review_text(rng_text, positivity, int(rng_text.integers(lo, hi + 1))) for _ in reviewers]
            rounds.append(ReviewRound(ri, editor, reviewers, texts))
        rounds_of.append(rounds)

    # -- citations ------------------------------------------------------------------
    cited: list[set[str]] = [set() for _ in drafts]
    earlier: dict[Category, list[int]] = {cat: [] for cat in CATEGORIES}
    year_start = 0
    for i, d in enumerate(drafts):
        if i > 0 and d["year"] != drafts[i - 1]["year"]:
            for j in range(year_start, i):
                earlier[labels[drafts[j]["lead"]]].append(j)
            year_start = i
        w = c.cite_weights(labels[d["lead"]])
        for _ in range(c.cites_per_paper):
            avail = np.array([len(earlier[t]) > 0 for t in CATEGORIES])
            ww = w * avail
            u_cat, u_pick = rng_cite.random(), rng_cite.random()
            if ww.sum() <= 0:
                continue
            t = CATEGORIES[int(np.searchsorted(np.cumsum(ww) / ww.sum(), u_cat, side="right"))]
            pool = earlier[t]
            j = pool[min(int(u_pick * len(pool)), len(pool) - 1)]
            cited[i].add(ids[j])

    incoming = [0] * len(drafts)
    index = {pid: i for i, pid in enumerate(ids)}
    for i in range(len(drafts)):
        for q in cited[i]:
            incoming[index[q]] += 1

    papers = []
    for i, d in enumerate(drafts):
        scale = c.group("citation_scale", labels[d["lead"]]) * (1.0 if d["accepted"] else 0.3)
        external = int(scale * (rng_cite.pareto(c.citation_tail)))
        papers.append(PaperRecord(
            paper_id=ids[i],
            title=f"Synthetic study {i} on {' and '.join(sorted(d['topics']))}",
            author_ids=d["team"],
            topics=d["topics"],
            submission_year=d["year"],
            decision=ACCEPTED if d["accepted"] else REJECTED,
            citation_count=incoming[i] + external,
            cited_paper_ids=cited[i],
            review_rounds=rounds_of[i],
        ))
    return Corpus(papers)


def concentrated_config(**overrides) -> SynthConfig:
    """Config with strongly concentrated High assignment and no cross-group teams.

    The general pools are large so that unrouted authors rarely share ids.
    """
    base = SynthConfig(concentration_high=1.0, concentration_mid=0.7, concentration_low=0.0, homophily=1.0,
                       reviewer_pool=2000, editor_pool=1000)
    return replace(base, **overrides)


def separable_classes(n: int, seed: int = 0, n_features: int = 2) -> tuple[np.ndarray, list[Category]]:
    """Three classes split by bands of the first feature with gaps between them.

    The remaining features are noise. Labels cycle High, Mid, Low.
    """
    if n_features < 1:
        raise ValueError("n_features must be >= 1")
    rng = np.random.default_rng(seed)
    y = [CATEGORIES[i % 3] for i in range(n)]
    centers = {Category.HIGH: 0.0, Category.MID: 1.0, Category.LOW: 2.0}
    X = rng.random((n, n_features))
    X[:, 0] = [centers[c] + 0.8 * rng.random() for c in y]
    return X, y
