import itertools

import numpy as np
import pytest

from conftest import corpus_of, paper
from peerscope.categorizer import CATEGORIES, Category
from peerscope.classifier import (FEATURE_NAMES, DecisionTree, GradientBoostedTrees, RandomForest, SplitSpec,
                                  build_dataset, build_features, classification_report, eligible_authors,
                                  evaluate, evaluate_dataset, load_model, model_from_json, model_to_json,
                                  save_model, split_authors, train_gbt, train_random_forest)
from peerscope.classifier.trees import n_candidate_features
from peerscope.corpus import record_reads
from peerscope.synth import separable_classes

H, M, L = Category.HIGH, Category.MID, Category.LOW


def gini(counts):
    n = sum(counts)
    return 1.0 - sum((c / n) ** 2 for c in counts) if n else 0.0


def best_stump(X, y, k):
    """Exhaustive search for the lowest weighted Gini over all (feature, cut)."""
    best = None
    for f in range(X.shape[1]):
        vals = sorted(set(X[:, f]))
        for lo, hi in zip(vals, vals[1:]):
            left = [y[i] for i in range(len(y)) if X[i, f] <= lo]
            right = [y[i] for i in range(len(y)) if X[i, f] > lo]
            imp = (len(left) * gini([left.count(c) for c in range(k)])
                   + len(right) * gini([right.count(c) for c in range(k)])) / len(y)
            if best is None or imp < best[0] - 1e-15:
                best = (imp, f, lo, hi)
    return best


@pytest.mark.parametrize("seed", range(10))
def test_stump_matches_exhaustive_search(seed):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 6, size=(25, 3)).astype(float)
    y = rng.integers(0, 3, size=25)
    t = DecisionTree(max_depth=1).fit(X, y, n_classes=3)
    imp, f, lo, hi = best_stump(X, y, 3)
    if t.node_count == 1:
        assert gini(np.bincount(y, minlength=3)) - imp <= 1e-15
        return
    assert t.feature[0] == f and lo <= t.threshold[0] < hi
    left = t.value[t.left[0]]
    assert np.allclose(left, np.bincount(y[X[:, f] <= lo], minlength=3) / np.sum(X[:, f] <= lo))


def test_tree_fits_training_data_and_respects_limits():
    X, y = separable_classes(90, seed=1, n_features=3)
    codes = [CATEGORIES.index(c) for c in y]
    t = DecisionTree(max_depth=None).fit(X, codes)
    assert list(t.predict(X)) == codes
    assert DecisionTree(max_depth=0).fit(X, codes).node_count == 1
    assert DecisionTree(max_depth=1).fit(X, codes).depth == 1
    big_leaves = DecisionTree(max_depth=None, min_leaf=20).fit(X, codes)
    assert np.bincount(big_leaves.apply(X)).max() >= 20
    assert t.feature_importances_[0] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        DecisionTree(min_leaf=0)


def test_candidate_feature_counts():
    assert n_candidate_features(None, 9) == 9
    assert n_candidate_features("sqrt", 9) == 3
    assert n_candidate_features("log2", 8) == 3
    assert n_candidate_features(0.5, 9) == 4
    assert n_candidate_features(20, 9) == 9
    with pytest.raises(ValueError):
        n_candidate_features(1.5, 9)


def test_one_tree_forest_equals_single_tree():
    X, y = separable_classes(120, seed=2, n_features=4)
    rf = RandomForest(trees=1, max_depth=None, features_per_split=None, bootstrap=False).fit(X, y)
    codes = [CATEGORIES.index(c) for c in y]
    t = DecisionTree(max_depth=None).fit(X, codes, n_classes=3)
    Xt, _ = separable_classes(60, seed=3, n_features=4)
    assert np.array_equal(rf.predict_proba(Xt), t.predict_proba(Xt))
    assert rf.trees_[0].to_dict() == t.to_dict()


@pytest.mark.parametrize("model", ["rf", "gbt"])
def test_separable_data_is_learned(model):
    X, y = separable_classes(600, seed=11, n_features=3)
    Xt, yt = separable_classes(300, seed=12, n_features=3)
    data = list(zip(X, y))
    m = (train_random_forest(data, {"trees": 50, "seed": 1}) if model == "rf"
         else train_gbt(data, {"rounds": 40}))
    rep = evaluate(m, Xt, yt, ["band", "n1", "n2"])
    assert rep.macro_f1 >= 0.95
    assert rep.confusion.sum(axis=1).tolist() == [yt.count(c) for c in CATEGORIES]
    assert rep.importances[0][0] == "band"


def test_gbt_loss_never_increases():
    X, y = separable_classes(150, seed=4, n_features=3)
    y = list(y)
    for i in range(0, 150, 7):  # label noise
        y[i] = CATEGORIES[(CATEGORIES.index(y[i]) + 1) % 3]
    m = GradientBoostedTrees(rounds=60, learning_rate=1.5, max_depth=4).fit(X, y)
    hist = m.loss_history_
    assert all(b <= a for a, b in zip(hist, hist[1:]))
    assert hist[-1] < hist[0]


def test_forest_is_seeded_and_job_count_invariant():
    X, y = separable_classes(90, seed=5, n_features=4)
    a = RandomForest(trees=8, seed=3).fit(X, y)
    b = RandomForest(trees=8, seed=3, n_jobs=2).fit(X, y)
    c = RandomForest(trees=8, seed=4).fit(X, y)
    assert model_to_json(a) == model_to_json(b)
    assert model_to_json(a) != model_to_json(c)


@pytest.mark.parametrize("cls, kw", [(RandomForest, {"trees": 5}), (GradientBoostedTrees, {"rounds": 5})])
def test_serialization_round_trip(tmp_path, cls, kw):
    X, y = separable_classes(60, seed=6, n_features=3)
    m = cls(**kw).fit(X, y)
    path = save_model(m, tmp_path / "m.json", ["a", "b", "c"])
    back = load_model(path)
    assert back.classes_ == m.classes_ and back.feature_names_ == ["a", "b", "c"]
    assert np.array_equal(back.predict_proba(X), m.predict_proba(X))
    assert model_to_json(back, ["a", "b", "c"]) == model_to_json(m, ["a", "b", "c"])
    with pytest.raises(ValueError):
        model_from_json('{"format": "other"}')


def test_bad_training_data():
    with pytest.raises(ValueError):
        RandomForest().fit([[0.0], [1.0]], [H, H])
    with pytest.raises(ValueError):
        RandomForest().fit([[np.nan], [1.0]], [H, L])
    with pytest.raises(ValueError):
        GradientBoostedTrees(learning_rate=0)


def test_classification_report_example():
    rep = classification_report([H, H, M, L], [H, M, M, M])
    assert rep.confusion.tolist() == [[1, 1, 0], [0, 1, 0], [0, 1, 0]]
    assert rep.precision == {H: 1.0, M: pytest.approx(1 / 3), L: None}
    assert rep.recall == {H: 0.5, M: 1.0, L: 0.0}
    assert rep.f1[M] == pytest.approx(0.5)
    assert rep.macro_f1 == pytest.approx((2 / 3 + 0.5 + 0.0) / 3)
    assert rep.accuracy == 0.5
    rep = classification_report([H, H], [H, M])
    assert rep.recall[L] is None and rep.f1[M] is None and rep.macro_f1 == pytest.approx(2 / 3)
    with pytest.raises(ValueError):
        classification_report([], [])


# -- temporal features ---------------------------------------------------------

def career_corpus():
    ps = []
    for i, a in enumerate(["x", "y", "z"]):
        for yr in range(2000 + i, 2008):
            ps.append(paper([a, "w"] if yr % 2 else [a], yr, yr % 3 != 0, pid=f"{a}{yr}", citations=50,
                            cites={f"x{yr - 1}"} if a != "x" and yr > 2000 else (),
                            rounds=[("e", [(f"r{yr % 4}", "good clear paper")])]))
    return corpus_of(*ps)


def test_split_spec_window_and_eligibility():
    spec = SplitSpec()
    assert spec.window(2000) == (2000, 2002)
    assert spec.label_year(2000) == 2004
    c = corpus_of(paper(["a"], 2000), paper(["a"], 2004), paper(["b"], 2000), paper(["b"], 2003))
    assert eligible_authors(c) == ["a"]
    with pytest.raises(ValueError):
        SplitSpec(train_years=0)


def test_features_only_read_the_window():
    c = career_corpus()
    with record_reads() as log:
        fv = build_features(c, None, "y")
    assert fv.window == (2001, 2003)
    assert log and max(p.submission_year for p in log) <= 2003
    assert len(fv.values) == len(FEATURE_NAMES)
    d = fv.as_dict()
    assert d["experience"] == 3.0
    # in-window citations only: y's papers are never cited, stored counts ignored
    assert d["citation_total"] == 0.0
    assert build_features(c, None, "x").as_dict()["citation_total"] == 3.0  # x2000..x2002 cited in window


def test_future_papers_do_not_change_features():
    c = career_corpus()
    later = corpus_of(*c, paper(["y", "x"], 2007, pid="late", cites={"y2001"}, rounds=[("e9", [("r9", "bad")])]))
    assert build_features(c, None, "y").values == build_features(later, None, "y").values


def test_dataset_and_split():
    c = career_corpus()
    labels = {"x": H, "y": M, "z": L, "w": L}
    data = build_dataset(c, labels)
    assert [fv.author_id for fv, _ in data] == ["w", "x", "y", "z"]
    train, test = split_authors(data, 0.5, seed=1)
    assert len(test) == 2 and {fv.author_id for fv, _ in train + test} == {"w", "x", "y", "z"}
    assert split_authors(data, 0.5, seed=1) == (train, test)
    with pytest.raises(ValueError):
        split_authors(data, 1.0)
    m = train_random_forest(data, {"trees": 3})
    rep = evaluate_dataset(m, data)
    assert rep.importances[0][0] in FEATURE_NAMES
