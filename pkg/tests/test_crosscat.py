import itertools
import random

import numpy as np
import pytest

import oracles
from conftest import corpus_of, paper
from peerscope.categorizer import Category
from peerscope.crosscat import (assignment_overlap, citation_uplift, class_edge_matrix, composition_matches,
                                jaccard, mixed_team_report, role_sets)
from peerscope.netbuild import AuthorGraph, build_ccn
from peerscope.textfeat import SentimentLexicon

H, M, L = Category.HIGH, Category.MID, Category.LOW


def test_jaccard_examples():
    assert jaccard({"e1", "e2"}, {"e2", "e3"}) == pytest.approx(1 / 3)
    assert jaccard({"x"}, {"x"}) == 1.0
    assert jaccard({"x"}, set()) == 0.0
    with pytest.raises(ValueError):
        jaccard(set(), set())


def test_class_edge_matrix_undirected_and_directed():
    labels = {"a": H, "b": H, "c": L}
    g = AuthorGraph(labels, {("a", "b"): 1, ("a", "c"): 1, ("c", "b"): 1}, directed=False)
    m = class_edge_matrix(g)
    assert m.total == 3 and m.pair(H, H) == 1 and m.pair(L, H) == 2 and m.pair(H, L) == 2
    assert np.array_equal(m.symmetric(), m.symmetric().T)
    assert m.fractions.sum() == pytest.approx(1.0)
    d = class_edge_matrix(AuthorGraph(labels, {("a", "c"): 1, ("c", "a"): 1, ("c", "b"): 1}, directed=True))
    assert d.pair(H, L) == 1 and d.pair(L, H) == 2
    with pytest.raises(ValueError):
        class_edge_matrix(AuthorGraph({"a": None, "b": H}, {("a", "b"): 1}, directed=False))
    with pytest.raises(ValueError):
        class_edge_matrix(AuthorGraph(labels, {}, directed=False))


def test_edge_matrix_counts_match_brute_force():
    rng = random.Random(5)
    for _ in range(20):
        g = oracles.random_graph(rng)
        labels = {v: rng.choice([H, M, L]) for v in g.nodes}
        if not g.n_edges:
            continue
        m = class_edge_matrix(g, labels)
        for a, b in itertools.product([H, M, L], repeat=2):
            if g.directed:
                want = sum(labels[u] == a and labels[v] == b for u, v in g.edges)
            else:
                want = sum({labels[u], labels[v]} == {a, b} and (a == b or labels[u] != labels[v])
                           for u, v in g.edges)
            assert m.pair(a, b) == want


def test_citation_uplift_example():
    labels = {"h": H, "l1": L, "l2": L, "l3": L, "l4": L}
    c = corpus_of(
        paper(["l1"], pid="A", citations=60), paper(["l2"], pid="B", citations=56),
        paper(["l3"], pid="C", citations=30), paper(["l4"], pid="D", citations=28),
        paper(["h"], pid="X", cites={"A", "B"}), paper(["l3"], pid="Y", cites={"C"}),
    )
    # Y's own author is Low, so C is not cited by High; Y itself is uncited.
    cited, uncited = citation_uplift(c, labels, H, L)
    assert cited == 58
    assert uncited == pytest.approx((30 + 28 + 0) / 3)
    assert citation_uplift(corpus_of(paper(["h"]), paper(["l1"])), labels, H, L) == (None, 0.0)
    with pytest.raises(ValueError):
        citation_uplift(c, labels, M, L)


@pytest.mark.parametrize("n, k, share, tol, ok", [
    (5, 1, 0.2, None, True),
    (5, 2, 0.2, None, False),
    (3, 1, 0.2, None, True),    # 0.6 rounds to 1
    (3, 0, 0.2, None, False),   # minority must be present
    (4, 1, 0.2, None, True),    # 0.8 rounds to 1
    (10, 2, 0.2, None, True),
    (10, 3, 0.2, 1, True),
    (10, 4, 0.2, 1, False),
    (2, 1, 0.5, None, True),
    (2, 2, 0.5, None, False),   # majority must be present
])
def test_composition_matches(n, k, share, tol, ok):
    assert composition_matches(n, k, share, tol) is ok


def test_mixed_team_report():
    labels = {"h1": H, "h2": H, "h3": H, "h4": H, "l": L, "m": M}
    lex = SentimentLexicon({"good": 1.0, "bad": -1.0})
    mixed = paper(["l", "h1", "h2", "h3", "h4"], pid="MX", citations=10, rounds=[("e", [("r", "good")])])
    c = corpus_of(mixed,
                  paper(["l"], pid="S1", citations=2, rounds=[("e", [("r", "bad")])]),
                  paper(["l", "m"], pid="S2", citations=4),
                  paper(["l", "h1"], pid="S3", citations=100))
    rep = mixed_team_report(c, labels, L, H, 0.2, lexicon=lex)
    assert rep.qualifying_papers == ("MX",)
    assert rep.focus_authors == ("l",)
    assert rep.collaborated == {"mean_papers": 1.0, "team_size": 5.0, "citation": 10.0, "review_sentiment": 1.0}
    assert rep.not_collaborated["mean_papers"] == 2.0
    assert rep.not_collaborated["citation"] == 6.0
    assert rep.not_collaborated["review_sentiment"] == -1.0
    assert rep.not_collaborated["team_size"] == 1.5
    maj = mixed_team_report(c, labels, L, H, 0.2, focus_cat=H, lexicon=lex)
    assert maj.focus_authors == ("h1", "h2", "h3", "h4")
    assert mixed_team_report(c, labels, L, M, 0.2, lexicon=lex).empty
    with pytest.raises(ValueError):
        mixed_team_report(c, labels, L, H, 1.0)
    with pytest.raises(ValueError):
        mixed_team_report(c, labels, L, H, 0.2, focus_cat=M)


def overlap_corpus():
    rv = lambda *eds: [(e, [("r", "")]) for e in eds]  # noqa: E731
    return corpus_of(
        paper(["h1"], rounds=rv("e1", "e2")), paper(["h2"], rounds=rv("e2", "e3")),
        paper(["h3"], rounds=rv("e1", "e2")), paper(["h1", "h3"], rounds=rv("e1")),
        paper(["l1"], rounds=rv("e9")), paper(["l2"], rounds=rv("e9", "e1")),
    )


def test_assignment_overlap_matches_brute_force():
    c = overlap_corpus()
    labels = {"h1": H, "h2": H, "h3": H, "l1": L, "l2": L}
    sets = role_sets(c, ["h1", "h2", "h3"], "editor")
    pairs = [oracles.jaccard(sets[a], sets[b]) for a, b in itertools.combinations(sorted(sets), 2)]
    rep = assignment_overlap(c, labels, "editor", "all", H)
    assert rep.n_pairs == 3
    assert rep.mean_j == pytest.approx(sum(pairs) / 3, abs=1e-12)
    assert rep.pct_j_eq_1 == pytest.approx(100 / 3)
    never = assignment_overlap(c, labels, "editor", "never_collaborated", H)
    assert never.n_pairs == 2 and never.mean_j == pytest.approx(1 / 3)
    cross = assignment_overlap(c, labels, "editor", "cross_category", H, L)
    assert cross.n_pairs == 6 and cross.categories == (H, L) and cross.label == "High-Low"
    want = [oracles.jaccard(sets[a], role_sets(c, [b], "editor")[b]) for a in sets for b in ("l1", "l2")]
    assert cross.mean_j == pytest.approx(sum(want) / 6, abs=1e-12)
    assert cross.pct_j_06_1 == 0.0


def test_assignment_overlap_errors():
    c = overlap_corpus()
    labels = {"h1": H, "h2": H, "h3": H, "l1": L, "l2": L}
    for kwargs in ({"role": "chair", "cat": H}, {"role": "editor", "pair_filter": "x", "cat": H},
                   {"role": "editor"}, {"role": "editor", "cat": M},
                   {"role": "editor", "pair_filter": "cross_category", "cat": H, "cat_b": H}):
        with pytest.raises(ValueError):
            assignment_overlap(c, labels, **kwargs)


def test_ccn_edge_matrix_on_fixture(fixture_corpus):
    from peerscope.categorizer import categorize_all
    labels = categorize_all(fixture_corpus)
    m = class_edge_matrix(build_ccn(fixture_corpus, labels))
    assert m.total == build_ccn(fixture_corpus).n_edges
