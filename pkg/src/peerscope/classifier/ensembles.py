"""Random forest and gradient-boosted trees over :mod:`.trees`."""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Hashable, Sequence

import numpy as np

from ..categorizer import CATEGORIES, Category
from .trees import DecisionTree, GradientTree

MODEL_FORMAT = "peerscope.model"
MODEL_VERSION = 1


def _class_order(y: Sequence[Hashable]) -> tuple:
    present = set(y)
    if all(isinstance(c, Category) for c in present):
        return tuple(c for c in CATEGORIES if c in present)
    return tuple(sorted(present))


def _encode(y, classes: Sequence[Hashable]) -> np.ndarray:
    pos = {c: i for i, c in enumerate(classes)}
    return np.asarray([pos[c] for c in y], dtype=np.int64)


def _check_dataset(X, y):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != len(y):
        raise ValueError("X must be 2-D with one row per label")
    if not np.isfinite(X).all():
        raise ValueError("X contains non-finite values")
    classes = _class_order(list(y))
    if len(classes) < 2:
        raise ValueError("training data must contain at least two classes")
    return X, classes


def _normalized(v: np.ndarray) -> np.ndarray:
    tot = v.sum()
    if tot > 0:
        return v / tot
    return np.full(v.shape, 1.0 / v.shape[0])


def _fit_forest_tree(args):
    X, y, n_classes, params, seed_seq, bootstrap = args
    rng = np.random.default_rng(seed_seq)
    idx = rng.integers(0, X.shape[0], X.shape[0]) if bootstrap else None
    tree = DecisionTree(params["max_depth"], params["min_leaf"], params["features_per_split"])
    return tree.fit(X, y, n_classes=n_classes, sample_indices=idx, rng=rng)


class RandomForest:
    """Bagged Gini trees; class probabilities are averaged over trees.

    Every tree draws its randomness from its own child of
    ``SeedSequence(seed)``, so results do not depend on ``n_jobs``.
    """

    kind = "random_forest"

    def __init__(self, trees: int = 200, max_depth: int | None = 12, min_leaf: int = 1,
                 features_per_split="sqrt", bootstrap: bool = True, seed: int = 0, n_jobs: int = 1):
        if trees < 1:
            raise ValueError("trees must be at least 1")
        self.params = dict(trees=trees, max_depth=max_depth, min_leaf=min_leaf,
                           features_per_split=features_per_split, bootstrap=bootstrap, seed=seed)
        self.n_jobs = n_jobs

    def fit(self, X, y):
        X, self.classes_ = _check_dataset(X, y)
        codes = _encode(y, self.classes_)
        p = self.params
        seeds = np.random.SeedSequence(p["seed"]).spawn(p["trees"])
        jobs = [(X, codes, len(self.classes_), p, s, p["bootstrap"]) for s in seeds]
        if self.n_jobs > 1:
            with ProcessPoolExecutor(max_workers=self.n_jobs) as pool:
                self.trees_ = list(pool.map(_fit_forest_tree, jobs))
        else:
            self.trees_ = [_fit_forest_tree(j) for j in jobs]
        self.n_features_ = X.shape[1]
        return self

    def predict_proba(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        proba = np.zeros((X.shape[0], len(self.classes_)))
        for t in self.trees_:
            proba += t.predict_proba(X)
        return proba / len(self.trees_)

    def predict(self, X) -> list:
        return [self.classes_[i] for i in np.argmax(self.predict_proba(X), axis=1)]

    @property
    def feature_importances_(self) -> np.ndarray:
        """Mean impurity decrease, averaged over trees, summing to 1."""
        return _normalized(np.mean([t.feature_importances_ for t in self.trees_], axis=0))

    def to_dict(self) -> dict:
        return {"params": self.params, "n_features": self.n_features_,
                "trees": [t.to_dict() for t in self.trees_]}

    @classmethod
    def _from_dict(cls, d: dict) -> "RandomForest":
        m = cls(**d["params"])
        m.n_features_ = d["n_features"]
        m.trees_ = [DecisionTree.from_dict(t) for t in d["trees"]]
        return m


def _softmax(F: np.ndarray) -> np.ndarray:
    Z = F - F.max(axis=1, keepdims=True)
    E = np.exp(Z)
    return E / E.sum(axis=1, keepdims=True)


def _cross_entropy(F: np.ndarray, Y: np.ndarray) -> float:
    Z = F - F.max(axis=1, keepdims=True)
    logp = Z - np.log(np.exp(Z).sum(axis=1, keepdims=True))
    return float(-(Y * logp).sum() / F.shape[0])


class GradientBoostedTrees:
    """Multiclass boosting with a softmax cross-entropy objective.

    Each round fits one :class:`GradientTree` per class to the gradient and
    diagonal hessian of the loss. If a full step would raise the training
    loss, the round's step is halved until it does not (at most
    ``max_backtrack`` times, then the round is kept with zero weight), so the
    recorded training loss never increases.
    """

    kind = "gbt"

    def __init__(self, rounds: int = 300, learning_rate: float = 0.1, max_depth: int = 3,
                 min_leaf: int = 1, reg_lambda: float = 1.0, features_per_split=None,
                 seed: int = 0, max_backtrack: int = 20):
        if not learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if rounds < 1:
            raise ValueError("rounds must be at least 1")
        self.params = dict(rounds=rounds, learning_rate=learning_rate, max_depth=max_depth,
                           min_leaf=min_leaf, reg_lambda=reg_lambda,
                           features_per_split=features_per_split, seed=seed, max_backtrack=max_backtrack)

    def fit(self, X, y):
        X, self.classes_ = _check_dataset(X, y)
        p = self.params
        K = len(self.classes_)
        Y = np.eye(K)[_encode(y, self.classes_)]
        prior = Y.mean(axis=0)
        self.base_score_ = np.log(np.clip(prior, 1e-12, None))
        F = np.tile(self.base_score_, (X.shape[0], 1))
        rng = np.random.default_rng(p["seed"])
        self.rounds_: list[list[GradientTree]] = []
        self.step_: list[float] = []
        loss = _cross_entropy(F, Y)
        self.loss_history_ = [loss]
        for _ in range(p["rounds"]):
            P = _softmax(F)
            trees, delta = [], np.zeros_like(F)
            for k in range(K):
                g = P[:, k] - Y[:, k]
                h = np.maximum(P[:, k] * (1.0 - P[:, k]), 1e-16)
                t = GradientTree(p["max_depth"], p["min_leaf"], p["reg_lambda"],
                                 max_features=p["features_per_split"]).fit(X, g, h, rng=rng)
                trees.append(t)
                delta[:, k] = t.predict(X)
            step = p["learning_rate"]
            for _ in range(p["max_backtrack"]):
                new_loss = _cross_entropy(F + step * delta, Y)
                if new_loss <= loss:
                    break
                step /= 2.0
            else:
                step, new_loss = 0.0, loss
            F = F + step * delta
            loss = new_loss
            self.rounds_.append(trees)
            self.step_.append(step)
            self.loss_history_.append(loss)
        self.n_features_ = X.shape[1]
        return self

    def decision_function(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        F = np.tile(self.base_score_, (X.shape[0], 1))
        for trees, step in zip(self.rounds_, self.step_):
            if step == 0.0:
                continue
            for k, t in enumerate(trees):
                F[:, k] += step * t.predict(X)
        return F

    def predict_proba(self, X) -> np.ndarray:
        return _softmax(self.decision_function(X))

    def predict(self, X) -> list:
        return [self.classes_[i] for i in np.argmax(self.decision_function(X), axis=1)]

    @property
    def feature_importances_(self) -> np.ndarray:
        """Total split gain per feature, normalised to sum to 1."""
        gain = np.zeros(self.n_features_)
        for trees in self.rounds_:
            for t in trees:
                gain += t.gain_
        return _normalized(gain)

    def to_dict(self) -> dict:
        return {"params": self.params, "n_features": self.n_features_,
                "base_score": [float(v).hex() for v in self.base_score_],
                "step": [float(s).hex() for s in self.step_],
                "loss_history": [float(v).hex() for v in self.loss_history_],
                "rounds": [[t.to_dict() for t in trees] for trees in self.rounds_]}

    @classmethod
    def _from_dict(cls, d: dict) -> "GradientBoostedTrees":
        m = cls(**d["params"])
        m.n_features_ = d["n_features"]
        m.base_score_ = np.asarray([float.fromhex(v) for v in d["base_score"]])
        m.step_ = [float.fromhex(s) for s in d["step"]]
        m.loss_history_ = [float.fromhex(v) for v in d["loss_history"]]
        m.rounds_ = [[GradientTree.from_dict(t) for t in trees] for trees in d["rounds"]]
        return m


# -- serialization -------------------------------------------------------------

_KINDS = {RandomForest.kind: RandomForest, GradientBoostedTrees.kind: GradientBoostedTrees}


def model_to_json(model, feature_names: Sequence[str] | None = None) -> str:
    classes = [c.value if isinstance(c, Category) else c for c in model.classes_]
    doc = {"format": MODEL_FORMAT, "version": MODEL_VERSION, "kind": model.kind,
           "classes": classes, "feature_names": list(feature_names) if feature_names else None,
           "model": model.to_dict()}
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def model_from_json(text: str):
    doc = json.loads(text)
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError("not a peerscope model file")
    if doc.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model version {doc.get('version')!r}")
    model = _KINDS[doc["kind"]]._from_dict(doc["model"])
    classes = doc["classes"]
    values = {c.value for c in CATEGORIES}
    model.classes_ = tuple(Category(c) if c in values else c for c in classes)
    model.feature_names_ = doc.get("feature_names")
    return model


def save_model(model, path: str | Path, feature_names: Sequence[str] | None = None) -> Path:
    path = Path(path)
    path.write_text(model_to_json(model, feature_names) + "\n", encoding="utf-8")
    return path


def load_model(path: str | Path):
    return model_from_json(Path(path).read_text(encoding="utf-8"))
