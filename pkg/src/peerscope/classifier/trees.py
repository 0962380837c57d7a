"""Array-backed decision trees.

:class:`DecisionTree` is a CART classifier with Gini splits.
:class:`GradientTree` is a second-order regression tree used by the boosted
ensemble (gain and leaf weights from gradient / hessian sums, L2-regularised).

Both store the fitted tree as flat arrays (``feature``, ``threshold``,
``left``, ``right``, ``value``); samples with ``x[feature] <= threshold`` go
left. Leaves have ``feature == -1``.
"""
from __future__ import annotations

import math

import numpy as np


def n_candidate_features(max_features, d: int) -> int:
    if max_features is None:
        return d
    if max_features == "sqrt":
        return max(1, int(math.sqrt(d)))
    if max_features == "log2":
        return max(1, int(math.log2(d))) if d > 1 else 1
    if isinstance(max_features, float):
        if not 0.0 < max_features <= 1.0:
            raise ValueError("fractional max_features must lie in (0, 1]")
        return max(1, int(max_features * d))
    k = int(max_features)
    if not 1 <= k:
        raise ValueError("max_features must be positive")
    return min(k, d)


def _split_positions(xs: np.ndarray, min_leaf: int) -> np.ndarray:
    """Indices i such that a split between sorted xs[i] and xs[i+1] is valid."""
    m = xs.shape[0]
    pos = np.nonzero(xs[:-1] < xs[1:])[0]
    return pos[(pos + 1 >= min_leaf) & (m - pos - 1 >= min_leaf)]


def _threshold(lo: float, hi: float) -> float:
    t = lo + (hi - lo) / 2.0
    return lo if t >= hi else t


class _ArrayTree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_features: int

    def _start(self):
        self._feature, self._threshold, self._left, self._right, self._value = [], [], [], [], []

    def _add_node(self, value) -> int:
        self._feature.append(-1)
        self._threshold.append(0.0)
        self._left.append(-1)
        self._right.append(-1)
        self._value.append(value)
        return len(self._feature) - 1

    def _finish(self):
        self.feature = np.asarray(self._feature, dtype=np.int64)
        self.threshold = np.asarray(self._threshold, dtype=float)
        self.left = np.asarray(self._left, dtype=np.int64)
        self.right = np.asarray(self._right, dtype=np.int64)
        self.value = np.asarray(self._value, dtype=float)
        del self._feature, self._threshold, self._left, self._right, self._value

    @property
    def node_count(self) -> int:
        return int(self.feature.shape[0])

    @property
    def depth(self) -> int:
        depth = np.zeros(self.node_count, dtype=np.int64)
        for i in range(self.node_count):
            if self.feature[i] >= 0:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    def apply(self, X) -> np.ndarray:
        """Leaf index reached by each row of X."""
        X = np.asarray(X, dtype=float)
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[node] >= 0
        while active.any():
            idx = np.nonzero(active)[0]
            nd = node[idx]
            go_left = X[idx, self.feature[nd]] <= self.threshold[nd]
            node[idx] = np.where(go_left, self.left[nd], self.right[nd])
            active = self.feature[node] >= 0
        return node

    def to_dict(self) -> dict:
        return {
            "n_features": self.n_features,
            "feature": self.feature.tolist(),
            "threshold": [float(t).hex() for t in self.threshold],
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": [[float(v).hex() for v in np.atleast_1d(row)] for row in self.value],
        }

    def _load(self, d: dict):
        self.n_features = d["n_features"]
        self.feature = np.asarray(d["feature"], dtype=np.int64)
        self.threshold = np.asarray([float.fromhex(t) for t in d["threshold"]], dtype=float)
        self.left = np.asarray(d["left"], dtype=np.int64)
        self.right = np.asarray(d["right"], dtype=np.int64)
        self.value = np.asarray([[float.fromhex(v) for v in row] for row in d["value"]], dtype=float)
        return self


class DecisionTree(_ArrayTree):
    """CART classification tree (Gini impurity).

    ``y`` must hold integer class codes in ``range(n_classes)``. With a
    ``max_features`` limit, features are examined in a random order and the
    search stops once that many were tried and a valid split was found;
    otherwise all features are scanned in column order. Ties keep the first
    candidate seen.
    """

    def __init__(self, max_depth: int | None = 12, min_leaf: int = 1, max_features=None, seed=None):
        if max_depth is not None and max_depth < 0:
            raise ValueError("max_depth must be non-negative")
        if min_leaf < 1:
            raise ValueError("min_leaf must be at least 1")
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.max_features = max_features
        self.seed = seed

    def fit(self, X, y, n_classes: int | None = None, sample_indices=None, rng=None):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=np.int64)
        if rng is None:
            rng = np.random.default_rng(self.seed)
        self.n_classes = int(n_classes if n_classes is not None else y.max() + 1)
        self.n_features = X.shape[1]
        idx = np.arange(X.shape[0]) if sample_indices is None else np.asarray(sample_indices, dtype=np.int64)
        self._k = n_candidate_features(self.max_features, self.n_features)
        self._onehot = np.eye(self.n_classes)[y]
        self._importance = np.zeros(self.n_features)
        self._n_total = idx.shape[0]
        self._start()
        self._grow(X, idx, 0, rng)
        self._finish()
        del self._onehot
        tot = self._importance.sum()
        self.raw_importances_ = self._importance
        self.feature_importances_ = self._importance / tot if tot > 0 else np.zeros(self.n_features)
        return self

    def _grow(self, X, idx, depth, rng) -> int:
        counts = self._onehot[idx].sum(0)
        m = idx.shape[0]
        node = self._add_node(counts / m)
        if (self.max_depth is not None and depth >= self.max_depth) or m < 2 * self.min_leaf \
                or np.count_nonzero(counts) <= 1:
            return node
        parent_gini = 1.0 - float(np.sum((counts / m) ** 2))
        best = None  # (impurity, feature, threshold)
        tried = 0
        order_f = range(self.n_features) if self._k >= self.n_features else rng.permutation(self.n_features)
        for f in order_f:
            if tried >= self._k and best is not None:
                break
            tried += 1
            xs = X[idx, f]
            order = np.argsort(xs, kind="stable")
            xs = xs[order]
            pos = _split_positions(xs, self.min_leaf)
            if pos.size == 0:
                continue
            left = np.cumsum(self._onehot[idx[order]], axis=0)[pos]
            nl = (pos + 1).astype(float)
            nr = m - nl
            right = counts - left
            gl = 1.0 - np.sum((left / nl[:, None]) ** 2, axis=1)
            gr = 1.0 - np.sum((right / nr[:, None]) ** 2, axis=1)
            imp = (nl * gl + nr * gr) / m
            j = int(np.argmin(imp))
            if best is None or imp[j] < best[0]:
                best = (float(imp[j]), int(f), _threshold(xs[pos[j]], xs[pos[j] + 1]))
        if best is None or parent_gini - best[0] <= 1e-15:
            return node
        imp, f, thr = best
        self._importance[f] += m / self._n_total * (parent_gini - imp)
        mask = X[idx, f] <= thr
        self._feature[node] = f
        self._threshold[node] = thr
        self._left[node] = self._grow(X, idx[mask], depth + 1, rng)
        self._right[node] = self._grow(X, idx[~mask], depth + 1, rng)
        return node

    def predict_proba(self, X) -> np.ndarray:
        return self.value[self.apply(X)]

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)

    @classmethod
    def from_dict(cls, d: dict) -> "DecisionTree":
        t = cls(d.get("max_depth"), d.get("min_leaf", 1), d.get("max_features"))
        t._load(d)
        t.n_classes = t.value.shape[1]
        return t

    def to_dict(self) -> dict:
        d = super().to_dict()
        d.update(max_depth=self.max_depth, min_leaf=self.min_leaf, max_features=self.max_features)
        return d


class GradientTree(_ArrayTree):
    """Regression tree fitted to gradient/hessian pairs.

    Split gain is ``GL^2/(HL+lam) + GR^2/(HR+lam) - G^2/(H+lam)`` (halved);
    leaf weight is ``-G/(H+lam)``. Returned ``value`` rows hold one weight.
    """

    def __init__(self, max_depth: int = 6, min_leaf: int = 1, reg_lambda: float = 1.0,
                 min_child_weight: float = 1e-6, max_features=None):
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.reg_lambda = reg_lambda
        self.min_child_weight = min_child_weight
        self.max_features = max_features

    def fit(self, X, grad, hess, rng=None):
        X = np.asarray(X, dtype=float)
        self._g = np.asarray(grad, dtype=float)
        self._h = np.asarray(hess, dtype=float)
        self.n_features = X.shape[1]
        self._k = n_candidate_features(self.max_features, self.n_features)
        self._rng = rng if rng is not None else np.random.default_rng(0)
        self.gain_ = np.zeros(self.n_features)
        self._start()
        self._grow(X, np.arange(X.shape[0]), 0)
        self._finish()
        del self._g, self._h, self._rng
        return self

    def _grow(self, X, idx, depth) -> int:
        lam = self.reg_lambda
        G = float(self._g[idx].sum())
        H = float(self._h[idx].sum())
        node = self._add_node([-G / (H + lam)])
        m = idx.shape[0]
        if depth >= self.max_depth or m < 2 * self.min_leaf:
            return node
        parent = G * G / (H + lam)
        best = None  # (gain, feature, threshold)
        features = np.arange(self.n_features)
        if self._k < self.n_features:
            features = np.sort(self._rng.choice(self.n_features, self._k, replace=False))
        for f in features:
            xs = X[idx, f]
            order = np.argsort(xs, kind="stable")
            xs = xs[order]
            pos = _split_positions(xs, self.min_leaf)
            if pos.size == 0:
                continue
            gl = np.cumsum(self._g[idx[order]])[pos]
            hl = np.cumsum(self._h[idx[order]])[pos]
            gr, hr = G - gl, H - hl
            ok = (hl >= self.min_child_weight) & (hr >= self.min_child_weight)
            if not ok.any():
                continue
            gain = 0.5 * (gl * gl / (hl + lam) + gr * gr / (hr + lam) - parent)
            gain = np.where(ok, gain, -np.inf)
            j = int(np.argmax(gain))
            if best is None or gain[j] > best[0]:
                best = (float(gain[j]), int(f), _threshold(xs[pos[j]], xs[pos[j] + 1]))
        if best is None or best[0] <= 1e-15:
            return node
        gain, f, thr = best
        self.gain_[f] += gain
        mask = X[idx, f] <= thr
        self._feature[node] = f
        self._threshold[node] = thr
        self._left[node] = self._grow(X, idx[mask], depth + 1)
        self._right[node] = self._grow(X, idx[~mask], depth + 1)
        return node

    def predict(self, X) -> np.ndarray:
        return self.value[self.apply(X), 0]

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["gain"] = [float(g).hex() for g in self.gain_]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GradientTree":
        t = cls()
        t._load(d)
        t.gain_ = np.asarray([float.fromhex(g) for g in d.get("gain", [])], dtype=float)
        return t
