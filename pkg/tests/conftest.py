from __future__ import annotations

import itertools
import sys

import pytest

from peerscope.corpus import ACCEPTED, REJECTED, Corpus, PaperRecord, ReviewRound

_ids = itertools.count()


def paper(authors, year=2000, accepted=True, *, pid=None, topics=("t",), cites=(), citations=0,
          rounds=None, title="x"):
    """Terse PaperRecord factory; ``rounds`` is a list of (editor, [(reviewer, text), ...])."""
    rr = []
    for i, (ed, revs) in enumerate(rounds or [], start=1):
        rr.append(ReviewRound(i, ed, [r for r, _ in revs], [t for _, t in revs]))
    return PaperRecord(
        paper_id=pid or f"p{next(_ids)}",
        title=title,
        author_ids=list(authors),
        topics=topics,
        submission_year=year,
        decision=ACCEPTED if accepted else REJECTED,
        citation_count=citations,
        cited_paper_ids=cites,
        review_rounds=rr,
    )


@pytest.fixture
def make_paper():
    return paper


@pytest.fixture(scope="session")
def fixture_path():
    from importlib.resources import files
    return files("peerscope.data") / "fixture.jsonl"


@pytest.fixture(scope="session")
def fixture_corpus(fixture_path):
    from peerscope.corpus import load_corpus
    return load_corpus(fixture_path)


def corpus_of(*papers) -> Corpus:
    return Corpus(papers)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
