"""Corpus data model, file ingestion and indexed views.

Two on-disk formats are supported:

* ``jsonl`` -- one paper object per line (canonical).
* ``csv_bundle`` -- a directory holding ``papers.csv``, ``reviews.csv`` and
  ``citations.csv``.

A :class:`Corpus` is immutable once built. Citation targets that do not
resolve to a paper in the corpus are kept on the record and listed in
:attr:`Corpus.unresolved`.
"""
from __future__ import annotations

import contextlib
import contextvars
import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

logger = logging.getLogger(__name__)

ACCEPTED = "accepted"
REJECTED = "rejected"
DECISIONS = (ACCEPTED, REJECTED)

JSONL_KEYS = (
    "paper_id",
    "title",
    "author_ids",
    "topics",
    "submission_year",
    "decision",
    "citation_count",
    "cited_paper_ids",
    "review_rounds",
)
ROUND_KEYS = ("round_index", "editor_id", "reviewer_ids", "review_texts")

PAPERS_CSV_HEADER = ["paper_id", "title", "submission_year", "decision", "citation_count", "author_ids", "topics"]
REVIEWS_CSV_HEADER = ["paper_id", "round_index", "editor_id", "reviewer_id", "review_text"]
CITATIONS_CSV_HEADER = ["citing_paper_id", "cited_paper_id"]


class CorpusError(ValueError):
    """Raised for malformed or inconsistent corpus input."""

    def __init__(self, message: str, *, file: str | None = None, line: int | None = None,
                 field: str | None = None, paper_id: str | None = None):
        self.reason = message
        self.file = file
        self.line = line
        self.field = field
        self.paper_id = paper_id
        where = []
        if file is not None:
            where.append(str(file))
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if paper_id is not None:
            where.append(f"paper {paper_id!r}")
        super().__init__(f"{': '.join(where)}: {message}" if where else message)


@dataclass(frozen=True)
class ReviewRound:
    round_index: int
    editor_id: str
    reviewer_ids: tuple[str, ...] = ()
    review_texts: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "reviewer_ids", tuple(self.reviewer_ids))
        object.__setattr__(self, "review_texts", tuple(self.review_texts))
        if isinstance(self.round_index, bool) or not isinstance(self.round_index, int) or self.round_index < 1:
            raise CorpusError(f"round_index must be a positive integer, got {self.round_index!r}",
                              field="round_index")
        if len(self.reviewer_ids) != len(self.review_texts):
            raise CorpusError(
                f"round {self.round_index}: {len(self.reviewer_ids)} reviewer_ids but "
                f"{len(self.review_texts)} review_texts", field="review_texts")


@dataclass(frozen=True)
class PaperRecord:
    paper_id: str
    title: str
    author_ids: tuple[str, ...]
    topics: frozenset[str]
    submission_year: int
    decision: str
    citation_count: int = 0
    cited_paper_ids: frozenset[str] = frozenset()
    review_rounds: tuple[ReviewRound, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "author_ids", tuple(self.author_ids))
        object.__setattr__(self, "topics", frozenset(self.topics))
        object.__setattr__(self, "cited_paper_ids", frozenset(self.cited_paper_ids))
        object.__setattr__(self, "review_rounds", tuple(self.review_rounds))
        pid = self.paper_id
        if not isinstance(pid, str) or not pid:
            raise CorpusError("paper_id must be a non-empty string", field="paper_id")
        if not self.author_ids:
            raise CorpusError("author_ids must be non-empty", field="author_ids", paper_id=pid)
        if len(set(self.author_ids)) != len(self.author_ids):
            raise CorpusError("author_ids contains duplicates", field="author_ids", paper_id=pid)
        if isinstance(self.submission_year, bool) or not isinstance(self.submission_year, int):
            raise CorpusError("submission_year must be an integer", field="submission_year", paper_id=pid)
        if self.decision not in DECISIONS:
            raise CorpusError(f"decision must be one of {DECISIONS}, got {self.decision!r}",
                              field="decision", paper_id=pid)
        if (isinstance(self.citation_count, bool) or not isinstance(self.citation_count, int)
                or self.citation_count < 0):
            raise CorpusError("citation_count must be a non-negative integer",
                              field="citation_count", paper_id=pid)
        if pid in self.cited_paper_ids:
            raise CorpusError("paper cites itself", field="cited_paper_ids", paper_id=pid)
        last = 0
        for rnd in self.review_rounds:
            if rnd.round_index <= last:
                raise CorpusError("round_index must be strictly increasing",
                                  field="review_rounds", paper_id=pid)
            last = rnd.round_index

    @property
    def accepted(self) -> bool:
        return self.decision == ACCEPTED

    def reviewer_ids(self) -> list[str]:
        """Reviewer ids over all rounds, one entry per (round, reviewer) incidence."""
        return [r for rnd in self.review_rounds for r in rnd.reviewer_ids]

    def editor_ids(self) -> list[str]:
        return [rnd.editor_id for rnd in self.review_rounds]

    def review_texts(self) -> list[str]:
        return [t for rnd in self.review_rounds for t in rnd.review_texts]

    def to_dict(self) -> dict:
        return {
            "paper_id": self.paper_id,
            "title": self.title,
            "author_ids": list(self.author_ids),
            "topics": sorted(self.topics),
            "submission_year": self.submission_year,
            "decision": self.decision,
            "citation_count": self.citation_count,
            "cited_paper_ids": sorted(self.cited_paper_ids),
            "review_rounds": [
                {
                    "round_index": r.round_index,
                    "editor_id": r.editor_id,
                    "reviewer_ids": list(r.reviewer_ids),
                    "review_texts": list(r.review_texts),
                }
                for r in self.review_rounds
            ],
        }


# Read auditing: feature builders must not touch records past their window.
# ``record_reads`` activates a log that every public Corpus accessor appends to.
_READ_LOG: contextvars.ContextVar[list | None] = contextvars.ContextVar("peerscope_read_log", default=None)


@contextlib.contextmanager
def record_reads():
    """Collect every PaperRecord handed out by a Corpus accessor.

    Yields a list that fills with the records read while the context is active.
    """
    log: list[PaperRecord] = []
    token = _READ_LOG.set(log)
    try:
        yield log
    finally:
        _READ_LOG.reset(token)


def _seen(papers):
    log = _READ_LOG.get()
    if log is not None:
        log.extend(papers)
    return papers


class Corpus:
    """Immutable, indexed collection of :class:`PaperRecord`.

    Indexes: author -> papers, year -> papers, paper -> citing papers.
    """

    def __init__(self, papers: Iterable[PaperRecord]):
        by_id: dict[str, PaperRecord] = {}
        for p in papers:
            if p.paper_id in by_id:
                raise CorpusError("duplicate paper_id", paper_id=p.paper_id)
            by_id[p.paper_id] = p
        self._papers = MappingProxyType(by_id)

        by_author: dict[str, list[PaperRecord]] = {}
        by_year: dict[int, list[PaperRecord]] = {}
        citing: dict[str, list[str]] = {pid: [] for pid in by_id}
        unresolved = []
        for p in by_id.values():
            for a in p.author_ids:
                by_author.setdefault(a, []).append(p)
            by_year.setdefault(p.submission_year, []).append(p)
            for q in sorted(p.cited_paper_ids):
                if q in by_id:
                    citing[q].append(p.paper_id)
                else:
                    unresolved.append((p.paper_id, q))
        self._by_author = {a: tuple(ps) for a, ps in sorted(by_author.items())}
        self._by_year = {y: tuple(ps) for y, ps in sorted(by_year.items())}
        self._citing = {q: tuple(sorted(c)) for q, c in citing.items()}
        self._unresolved = tuple(unresolved)

    # -- basic protocol -------------------------------------------------
    def __len__(self) -> int:
        return len(self._papers)

    def __iter__(self) -> Iterator[PaperRecord]:
        return iter(_seen(list(self._papers.values())))

    def __contains__(self, paper_id) -> bool:
        return paper_id in self._papers

    def __eq__(self, other) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return dict(self._papers) == dict(other._papers)

    def __repr__(self) -> str:
        return f"Corpus({len(self)} papers, {len(self._by_author)} authors)"

    # -- indexed views ----------------------------------------------------
    def paper(self, paper_id: str) -> PaperRecord:
        try:
            p = self._papers[paper_id]
        except KeyError:
            raise KeyError(f"unknown paper_id {paper_id!r}") from None
        _seen([p])
        return p

    @property
    def paper_ids(self) -> tuple[str, ...]:
        return tuple(self._papers)

    @property
    def authors(self) -> tuple[str, ...]:
        """Sorted ids of every author with at least one submission."""
        return tuple(self._by_author)

    @property
    def years(self) -> tuple[int, ...]:
        return tuple(self._by_year)

    def has_author(self, author: str) -> bool:
        return author in self._by_author

    def papers_by_author(self, author: str) -> tuple[PaperRecord, ...]:
        try:
            return _seen(self._by_author[author])
        except KeyError:
            raise KeyError(f"unknown author {author!r}") from None

    def papers_in_year(self, year: int) -> tuple[PaperRecord, ...]:
        return _seen(self._by_year.get(year, ()))

    def citing(self, paper_id: str) -> tuple[str, ...]:
        """Ids of in-corpus papers that cite ``paper_id`` (reverse citation index)."""
        return self._citing.get(paper_id, ())

    @property
    def unresolved(self) -> tuple[tuple[str, str], ...]:
        """``(citing_paper_id, unknown_target_id)`` pairs kept but flagged at load."""
        return self._unresolved

    def career_span(self, author: str) -> tuple[int, int]:
        years = [p.submission_year for p in self._by_author[author]]
        return min(years), max(years)

    # -- derived corpora -------------------------------------------------
    def window(self, last_year: int, first_year: int | None = None) -> "Corpus":
        """Sub-corpus of papers submitted in ``[first_year, last_year]``.

        Filtering inspects only ``submission_year`` and is not recorded by
        :func:`record_reads`.
        """
        keep = [p for p in self._papers.values()
                if p.submission_year <= last_year and (first_year is None or p.submission_year >= first_year)]
        return Corpus(keep)


def author_year_submissions(corpus: Corpus, author: str, year: int) -> tuple[int, int]:
    """Return ``(submitted, accepted)`` counts of ``author`` in ``year``."""
    if not corpus.has_author(author):
        raise KeyError(f"unknown author {author!r}")
    papers = [p for p in corpus.papers_by_author(author) if p.submission_year == year]
    return len(papers), sum(p.accepted for p in papers)


# -- parsing ----------------------------------------------------------------

def _require(obj: dict, key: str, typ: type, *, file, line, pid=None):
    if key not in obj:
        raise CorpusError("missing field", file=file, line=line, field=key, paper_id=pid)
    val = obj[key]
    if not isinstance(val, typ) or (typ is int and isinstance(val, bool)):
        raise CorpusError(f"wrong type {type(val).__name__}", file=file, line=line, field=key, paper_id=pid)
    return val


def _str_list(obj, key, *, file, line, pid):
    val = _require(obj, key, list, file=file, line=line, pid=pid)
    if not all(isinstance(v, str) for v in val):
        raise CorpusError("expected a list of strings", file=file, line=line, field=key, paper_id=pid)
    return val


def paper_from_dict(obj: dict, *, file: str | None = None, line: int | None = None) -> PaperRecord:
    """Validate one JSON object against the ``papers.jsonl`` schema."""
    if not isinstance(obj, dict):
        raise CorpusError("record is not a JSON object", file=file, line=line)
    extra = set(obj) - set(JSONL_KEYS)
    if extra:
        raise CorpusError(f"unexpected keys {sorted(extra)}", file=file, line=line, field=sorted(extra)[0])
    pid = _require(obj, "paper_id", str, file=file, line=line)
    kw = dict(file=file, line=line, pid=pid)
    rounds = []
    for i, r in enumerate(_require(obj, "review_rounds", list, **kw)):
        if not isinstance(r, dict) or set(r) != set(ROUND_KEYS):
            raise CorpusError(f"review_rounds[{i}] must have keys {list(ROUND_KEYS)}",
                              file=file, line=line, field="review_rounds", paper_id=pid)
        try:
            rounds.append(ReviewRound(
                round_index=_require(r, "round_index", int, **kw),
                editor_id=_require(r, "editor_id", str, **kw),
                reviewer_ids=_str_list(r, "reviewer_ids", **kw),
                review_texts=_str_list(r, "review_texts", **kw),
            ))
        except CorpusError as exc:
            if exc.file is not None:
                raise
            raise CorpusError(exc.reason, file=file, line=line, field=exc.field or "review_rounds",
                              paper_id=pid) from None
    try:
        return PaperRecord(
            paper_id=pid,
            title=_require(obj, "title", str, **kw),
            author_ids=_str_list(obj, "author_ids", **kw),
            topics=_str_list(obj, "topics", **kw),
            submission_year=_require(obj, "submission_year", int, **kw),
            decision=_require(obj, "decision", str, **kw),
            citation_count=_require(obj, "citation_count", int, **kw) if "citation_count" in obj else 0,
            cited_paper_ids=_str_list(obj, "cited_paper_ids", **kw),
            review_rounds=rounds,
        )
    except CorpusError as exc:
        if exc.file is not None or file is None:
            raise
        raise CorpusError(exc.reason, file=file, line=line, field=exc.field, paper_id=pid) from None


def read_jsonl(path: str | Path) -> list[PaperRecord]:
    path = Path(path)
    papers = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"invalid JSON ({exc.msg})", file=str(path), line=lineno) from None
            papers.append(paper_from_dict(obj, file=str(path), line=lineno))
    return papers


def _csv_rows(path: Path, header: list[str]):
    if not path.exists():
        raise CorpusError("missing bundle file", file=str(path))
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first != header:
            raise CorpusError(f"header must be {','.join(header)}", file=str(path), line=1)
        for row in reader:
            lineno = reader.line_num
            if not row:
                continue
            if len(row) != len(header):
                raise CorpusError(f"expected {len(header)} columns, got {len(row)}", file=str(path), line=lineno)
            yield lineno, dict(zip(header, row))


def _int(value: str, *, file, line, field, pid=None, default=None) -> int:
    if value == "" and default is not None:
        return default
    try:
        return int(value)
    except ValueError:
        raise CorpusError(f"not an integer: {value!r}", file=file, line=line, field=field, paper_id=pid) from None


def read_csv_bundle(directory: str | Path) -> list[PaperRecord]:
    directory = Path(directory)
    ppath, rpath, cpath = directory / "papers.csv", directory / "reviews.csv", directory / "citations.csv"
    base: dict[str, dict] = {}
    for lineno, row in _csv_rows(ppath, PAPERS_CSV_HEADER):
        pid = row["paper_id"]
        if pid in base:
            raise CorpusError("duplicate paper_id", file=str(ppath), line=lineno, field="paper_id", paper_id=pid)
        kw = dict(file=str(ppath), line=lineno, pid=pid)
        base[pid] = {
            "line": lineno,
            "paper_id": pid,
            "title": row["title"],
            "submission_year": _int(row["submission_year"], field="submission_year", **kw),
            "decision": row["decision"],
            "citation_count": _int(row["citation_count"], field="citation_count", default=0, **kw),
            "author_ids": [a for a in row["author_ids"].split(";") if a],
            "topics": [t for t in row["topics"].split(";") if t],
            "cited": [],
            "rounds": {},
        }
    for lineno, row in _csv_rows(rpath, REVIEWS_CSV_HEADER):
        pid = row["paper_id"]
        if pid not in base:
            raise CorpusError("review for unknown paper", file=str(rpath), line=lineno, field="paper_id", paper_id=pid)
        idx = _int(row["round_index"], file=str(rpath), line=lineno, field="round_index", pid=pid)
        rnd = base[pid]["rounds"].setdefault(idx, {"editor_id": row["editor_id"], "reviewers": [], "texts": []})
        if rnd["editor_id"] != row["editor_id"]:
            raise CorpusError("conflicting editor_id within one round", file=str(rpath), line=lineno,
                              field="editor_id", paper_id=pid)
        if row["reviewer_id"] or row["review_text"]:
            rnd["reviewers"].append(row["reviewer_id"])
            rnd["texts"].append(row["review_text"])
    for lineno, row in _csv_rows(cpath, CITATIONS_CSV_HEADER):
        pid = row["citing_paper_id"]
        if pid not in base:
            raise CorpusError("citation from unknown paper", file=str(cpath), line=lineno,
                              field="citing_paper_id", paper_id=pid)
        base[pid]["cited"].append(row["cited_paper_id"])

    papers = []
    for pid, b in base.items():
        try:
            rounds = [ReviewRound(i, r["editor_id"], r["reviewers"], r["texts"]) for i, r in sorted(b["rounds"].items())]
            papers.append(PaperRecord(
                paper_id=pid, title=b["title"], author_ids=b["author_ids"], topics=b["topics"],
                submission_year=b["submission_year"], decision=b["decision"],
                citation_count=b["citation_count"], cited_paper_ids=b["cited"], review_rounds=rounds))
        except CorpusError as exc:
            raise CorpusError(exc.reason, file=str(ppath), line=b["line"], field=exc.field,
                              paper_id=pid) from None
    return papers


def load_corpus(path: str | Path, format: str = "jsonl") -> Corpus:
    """Read and validate a corpus from ``path``.

    ``format`` is ``"jsonl"`` (a file) or ``"csv_bundle"`` / ``"csv"`` (a directory).
    """
    path = Path(path)
    if not path.exists():
        raise CorpusError("path does not exist", file=str(path))
    if format == "jsonl":
        papers = read_jsonl(path)
    elif format in ("csv_bundle", "csv"):
        papers = read_csv_bundle(path)
    else:
        raise ValueError(f"unknown corpus format {format!r}")
    if not papers:
        raise CorpusError("corpus is empty", file=str(path))
    seen = set()
    for p in papers:
        if p.paper_id in seen:
            raise CorpusError("duplicate paper_id", file=str(path), field="paper_id", paper_id=p.paper_id)
        seen.add(p.paper_id)
    corpus = Corpus(papers)
    logger.info("loaded %d papers from %s (%d unresolved citation targets flagged)",
                len(corpus), path, len(corpus.unresolved))
    return corpus


# -- serialization ----------------------------------------------------------

def dumps_jsonl(corpus: Corpus) -> str:
    lines = [json.dumps(p.to_dict(), ensure_ascii=False) for p in corpus._papers.values()]
    return "".join(line + "\n" for line in lines)


def write_jsonl(corpus: Corpus, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_jsonl(corpus))
    return path


def write_csv_bundle(corpus: Corpus, directory: str | Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    papers = list(corpus._papers.values())
    with open(directory / "papers.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PAPERS_CSV_HEADER)
        for p in papers:
            w.writerow([p.paper_id, p.title, p.submission_year, p.decision, p.citation_count,
                        ";".join(p.author_ids), ";".join(sorted(p.topics))])
    with open(directory / "reviews.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REVIEWS_CSV_HEADER)
        for p in papers:
            for r in p.review_rounds:
                if not r.reviewer_ids:
                    w.writerow([p.paper_id, r.round_index, r.editor_id, "", ""])
                for rid, text in zip(r.reviewer_ids, r.review_texts):
                    w.writerow([p.paper_id, r.round_index, r.editor_id, rid, text])
    with open(directory / "citations.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CITATIONS_CSV_HEADER)
        for p in papers:
            for q in sorted(p.cited_paper_ids):
                w.writerow([p.paper_id, q])
    return directory
