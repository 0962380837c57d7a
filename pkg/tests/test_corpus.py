import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import corpus_of, paper
from peerscope.corpus import (Corpus, CorpusError, PaperRecord, ReviewRound, author_year_submissions,
                              dumps_jsonl, load_corpus, record_reads, write_csv_bundle, write_jsonl)


def twelve_papers():
    ps = []
    for i in range(12):
        cites = {f"q{j}" for j in range(i) if (i * 7 + j) % 3 == 0}
        ps.append(paper([f"a{i % 4}", f"b{i % 3}"] if i % 5 else [f"a{i % 4}"],
                        year=2000 + i % 4, accepted=i % 3 != 0, pid=f"q{i}", cites=cites,
                        citations=i, rounds=[("e1", [("r1", "fine work"), ("r2", "unclear")])]))
    return ps


def test_twelve_paper_fixture_reverse_index_is_transpose():
    c = corpus_of(*twelve_papers())
    assert len(c) == 12
    # brute-force transpose
    for q in c.paper_ids:
        expected = sorted(p.paper_id for p in c if q in p.cited_paper_ids)
        assert list(c.citing(q)) == expected
    for p in c:
        for q in p.cited_paper_ids:
            assert p.paper_id in c.citing(q)


def test_mismatched_review_lengths_name_the_paper(tmp_path):
    rec = paper(["a"], pid="bad1").to_dict()
    rec["review_rounds"] = [{"round_index": 1, "editor_id": "e", "reviewer_ids": ["r1", "r2"],
                             "review_texts": ["only one"]}]
    f = tmp_path / "p.jsonl"
    f.write_text(json.dumps(rec) + "\n")
    with pytest.raises(CorpusError) as ei:
        load_corpus(f)
    assert ei.value.paper_id == "bad1"
    assert ei.value.line == 1
    assert "bad1" in str(ei.value) and "p.jsonl" in str(ei.value)


def test_unknown_citation_target_is_flagged_not_fatal():
    c = corpus_of(paper(["a"], pid="A", cites={"X"}))
    assert c.unresolved == (("A", "X"),)
    assert c.citing("X") == ()


def test_author_year_submissions():
    c = corpus_of(paper(["a"], 2003, True), paper(["a", "b"], 2003, True), paper(["a"], 2003, False),
                  paper(["b"], 1997, True))
    assert author_year_submissions(c, "a", 2003) == (3, 2)
    assert author_year_submissions(c, "a", 1999) == (0, 0)
    assert author_year_submissions(c, "b", 1997) == (1, 1)
    with pytest.raises(KeyError):
        author_year_submissions(c, "zz", 2003)


def test_submission_count_sum_matches_author_list_lengths():
    c = corpus_of(*twelve_papers())
    per_author = sum(len(c.papers_by_author(a)) for a in c.authors)
    assert per_author == sum(len(p.author_ids) for p in c)


def test_jsonl_and_csv_round_trip(tmp_path):
    c = corpus_of(*twelve_papers(), paper(["z"], pid="norev"))
    write_jsonl(c, tmp_path / "c.jsonl")
    assert load_corpus(tmp_path / "c.jsonl") == c
    write_csv_bundle(c, tmp_path / "bundle")
    assert load_corpus(tmp_path / "bundle", "csv_bundle") == c


def test_missing_citation_count_defaults_to_zero(tmp_path):
    rec = paper(["a"], pid="nc").to_dict()
    del rec["citation_count"]
    f = tmp_path / "p.jsonl"
    f.write_text(json.dumps(rec) + "\n")
    assert load_corpus(f).paper("nc").citation_count == 0


@pytest.mark.parametrize("mutate, field", [
    (lambda r: r.update(decision="maybe"), "decision"),
    (lambda r: r.update(author_ids=[]), "author_ids"),
    (lambda r: r.update(citation_count=-1), "citation_count"),
    (lambda r: r.update(submission_year="2001"), "submission_year"),
    (lambda r: r.update(extra=1), "extra"),
    (lambda r: r.pop("title"), "title"),
])
def test_malformed_records_name_file_line_field(tmp_path, mutate, field):
    good = paper(["a"], pid="ok").to_dict()
    bad = paper(["b"], pid="bad").to_dict()
    mutate(bad)
    f = tmp_path / "p.jsonl"
    f.write_text(json.dumps(good) + "\n" + json.dumps(bad) + "\n")
    with pytest.raises(CorpusError) as ei:
        load_corpus(f)
    assert ei.value.line == 2
    assert ei.value.field == field
    assert ei.value.file.endswith("p.jsonl")


def test_duplicate_and_empty(tmp_path):
    f = tmp_path / "p.jsonl"
    rec = json.dumps(paper(["a"], pid="d").to_dict())
    f.write_text(rec + "\n" + rec + "\n")
    with pytest.raises(CorpusError, match="duplicate"):
        load_corpus(f)
    f.write_text("")
    with pytest.raises(CorpusError, match="empty"):
        load_corpus(f)


def test_csv_header_required(tmp_path):
    write_csv_bundle(corpus_of(paper(["a"])), tmp_path)
    (tmp_path / "citations.csv").write_text("from,to\n")
    with pytest.raises(CorpusError) as ei:
        load_corpus(tmp_path, "csv_bundle")
    assert ei.value.line == 1 and ei.value.file.endswith("citations.csv")


def test_record_invariants():
    with pytest.raises(CorpusError):
        paper(["a", "a"])
    with pytest.raises(CorpusError):
        paper(["a"], pid="s", cites={"s"})
    with pytest.raises(CorpusError):
        ReviewRound(0, "e")
    with pytest.raises(CorpusError):
        PaperRecord("x", "t", ["a"], [], 2000, "accepted",
                    review_rounds=[ReviewRound(2, "e"), ReviewRound(1, "e")])


def test_window_and_read_log():
    c = corpus_of(paper(["a"], 2000), paper(["a"], 2001), paper(["a"], 2003))
    w = c.window(2001)
    assert sorted(p.submission_year for p in w) == [2000, 2001]
    with record_reads() as log:
        c.papers_by_author("a")
    assert len(log) == 3
    with record_reads() as log:
        c.window(2000)
        c.career_span("a")
    assert log == []


ids = st.text(alphabet="abcdef0123", min_size=1, max_size=4)


@st.composite
def corpora(draw):
    n = draw(st.integers(1, 6))
    ps = []
    for i in range(n):
        authors = draw(st.lists(ids, min_size=1, max_size=3, unique=True))
        n_rev = draw(st.integers(0, 2))
        rounds = [("e" + draw(ids), [(draw(ids), draw(st.text(max_size=20))) for _ in range(n_rev)])
                  for _ in range(draw(st.integers(0, 2)))]
        cites = draw(st.sets(st.sampled_from([f"P{j}" for j in range(n)] + ["ghost"]), max_size=3)) - {f"P{i}"}
        ps.append(paper(authors, draw(st.integers(1990, 2020)), draw(st.booleans()), pid=f"P{i}",
                        topics=draw(st.sets(ids, max_size=3)), cites=cites, citations=draw(st.integers(0, 99)),
                        rounds=rounds, title=draw(st.text(max_size=10))))
    return Corpus(ps)


@settings(max_examples=40, deadline=None)
@given(corpora())
def test_round_trip_property(tmp_path_factory, c):
    d = tmp_path_factory.mktemp("rt")
    write_jsonl(c, d / "c.jsonl")
    again = load_corpus(d / "c.jsonl")
    assert again == c
    assert dumps_jsonl(again) == dumps_jsonl(c)
    for p in c:
        for q in p.cited_paper_ids:
            assert (q in c) == (p.paper_id in c.citing(q))
