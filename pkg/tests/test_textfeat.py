import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import corpus_of, paper
from peerscope.categorizer import Category
from peerscope.textfeat import (EMOTIONS, EmotionLexicons, SentimentLexicon, author_diversity,
                                author_review_features, category_diversity, load_emotion_lexicons,
                                load_sentiment_lexicon, load_stopwords, lqi, review_length, role_occurrences,
                                sentiment, shannon_index, tokenize)

LEX = SentimentLexicon({"good": 0.8, "fine": 0.4, "bad": -0.5, "nice": 0.5})
EMO = EmotionLexicons({e: frozenset({e[:4], "hit"}) for e in EMOTIONS} | {"positive": frozenset({"good", "hit"})})


def entropy_oracle(ids):
    n = len(ids)
    return -sum((ids.count(x) / n) * math.log(ids.count(x) / n) for x in set(ids))


def test_tokenize():
    assert tokenize("Well-written, GOOD paper_2!") == ["well", "written", "good", "paper", "2"]


def test_sentiment_examples():
    assert sentiment("", LEX) == 0.0
    assert sentiment("Good and fine.", LEX) == pytest.approx(0.6, abs=1e-15)
    assert sentiment("nice but bad", LEX) == 0.0
    assert sentiment("no lexicon words", LEX) == 0.0


def test_review_length_examples():
    stop = {"this", "is", "a"}
    assert review_length("this is a well written paper", stop) == 3
    assert review_length("", stop) == 0
    assert review_length("This is a", stop) == 0


def test_shannon_examples():
    assert shannon_index(["r1"] * 3).entropy == 0.0
    assert shannon_index(["r1", "r2", "r3", "r4"]).entropy == pytest.approx(math.log(4), abs=1e-15)
    d = shannon_index(["r1", "r1", "r2", "r2"])
    assert d.entropy == pytest.approx(math.log(2), abs=1e-15)
    assert (d.support, d.total, d.counts) == (2, 4, {"r1": 2, "r2": 2})
    assert shannon_index(["a", "b"], base=2).entropy == pytest.approx(1.0)
    with pytest.raises(ValueError):
        shannon_index([])


@settings(max_examples=200)
@given(st.lists(st.sampled_from("abcdefg"), min_size=1, max_size=40), st.randoms())
def test_shannon_oracle_and_permutation(ids, rnd):
    d = shannon_index(ids)
    assert d.entropy == pytest.approx(entropy_oracle(ids), abs=1e-12)
    shuffled = list(ids)
    rnd.shuffle(shuffled)
    assert shannon_index(shuffled).entropy == d.entropy
    assert 0.0 <= d.entropy <= math.log(d.support) + 1e-12
    assert sum(d.counts.values()) == d.total
    majority = max(d.counts, key=lambda k: (d.counts[k], k))
    assert shannon_index(ids + [majority]).entropy <= d.entropy + 1e-12


def test_lqi_examples():
    text = "hit good one two three four five six seven eight"
    vals = lqi(text, EMO)
    assert vals["positive"] == pytest.approx(0.2)
    assert vals["optimism"] == pytest.approx(0.1)
    assert lqi("", EMO) == {e: 0.0 for e in EMOTIONS}
    assert lqi("nothing matches", EMO) == {e: 0.0 for e in EMOTIONS}


def rv(*texts):
    return [("ed", [(f"r{i}", t) for i, t in enumerate(texts)])]


def test_author_review_features_examples():
    stop = frozenset({"the"})
    c = corpus_of(paper(["a"], rounds=rv("good")), paper(["a"], rounds=[("e", [("r", "good")]), ("e", [("r", "bad bad")])]))
    # paper 1: 0.8; paper 2: mean(0.8, -0.5) = 0.15 -> author mean 0.475
    f = author_review_features(c, "a", LEX, EMO, stop)
    assert f.sentiment == pytest.approx(0.475)
    c = corpus_of(paper(["a"], rounds=rv("good")), paper(["a"], rounds=rv("bad")))
    assert author_review_features(c, "a", SentimentLexicon({"good": 0.2, "bad": -0.2}), EMO, stop).sentiment == 0.0
    c = corpus_of(paper(["a"], rounds=rv("the one two three four five")))
    assert author_review_features(c, "a", LEX, EMO, stop).length == 5
    c = corpus_of(paper(["a"], rounds=rv("w " * 100)), paper(["a"], rounds=rv("w " * 300)))
    assert author_review_features(c, "a", LEX, EMO, stop).length == 200
    with pytest.raises(ValueError):
        author_review_features(corpus_of(paper(["b"])), "b", LEX, EMO, stop)


def test_category_diversity_examples():
    one_editor = corpus_of(paper(["a"], rounds=[("E", [("r1", "x")])]), paper(["b"], rounds=[("E", [("r2", "y")])]))
    labels = {"a": Category.HIGH, "b": Category.HIGH}
    assert category_diversity(one_editor, labels, Category.HIGH, "editor").entropy == 0.0
    four = corpus_of(paper(["a"], rounds=[("E", [("r1", "x"), ("r2", "y")])]),
                     paper(["b"], rounds=[("E", [("r3", "x"), ("r4", "y")])]))
    assert category_diversity(four, labels, Category.HIGH, "reviewer").entropy == pytest.approx(math.log(4))
    with pytest.raises(ValueError):
        category_diversity(four, labels, Category.LOW, "reviewer")


def test_incidence_counting_and_rejected_switch():
    # a co-authored paper contributes once per author; rounds repeat ids
    c = corpus_of(paper(["a", "b"], rounds=[("E", [("r1", "x")]), ("E", [("r1", "x")])]),
                  paper(["a"], accepted=False, rounds=[("F", [("r9", "z")])]))
    occ = role_occurrences(c, ["a", "b"], "reviewer")
    assert occ == ["r1", "r1", "r1", "r1"]
    assert role_occurrences(c, ["a"], "editor", include_rejected=True) == ["E", "E", "F"]
    assert author_diversity(c, "a", "editor", include_rejected=True).entropy == pytest.approx(entropy_oracle(["E", "E", "F"]))
    with pytest.raises(ValueError):
        role_occurrences(c, ["a"], "chair")


def test_bundled_resources_load():
    lex, emo, stop = load_sentiment_lexicon(), load_emotion_lexicons(), load_stopwords()
    assert len(lex.polarity) > 20 and all(-1 <= v <= 1 for v in lex.polarity.values())
    assert set(emo.sets) >= set(EMOTIONS)
    assert "the" in stop


def test_custom_lexicon_files(tmp_path):
    (tmp_path / "l.csv").write_text("token,polarity\nYay,1\nboo,-1\n", encoding="utf-8")
    lex = load_sentiment_lexicon(tmp_path / "l.csv")
    assert sentiment("yay boo yay", lex) == pytest.approx(1 / 3)
    (tmp_path / "s.txt").write_text("a\nthe\n")
    assert load_stopwords(tmp_path / "s.txt") == {"a", "the"}
    with pytest.raises(ValueError):
        SentimentLexicon({"x": 2.0})
    with pytest.raises(ValueError):
        EmotionLexicons({"positive": frozenset({"x"})})


@settings(max_examples=100)
@given(st.lists(st.sampled_from(["good", "fine", "bad", "nice", "zzz", "the"]), max_size=15),
       st.sets(st.sampled_from(["good", "fine", "bad", "nice", "zzz", "the"])))
def test_sentiment_bounds_and_length_monotone(tokens, extra_stop):
    text = " ".join(tokens)
    s = sentiment(text, LEX)
    matched = [LEX.polarity[t] for t in tokens if t in LEX.polarity]
    if matched:
        assert min(matched) - 1e-12 <= s <= max(matched) + 1e-12
    base = {"the"}
    assert review_length(text, base | extra_stop) <= review_length(text, base)
