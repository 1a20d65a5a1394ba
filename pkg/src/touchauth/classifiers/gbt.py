"""Second-order gradient boosting of regression trees on logistic loss."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import GBTConfig
from .mlp import sigmoid


@dataclass(frozen=True)
class Tree:
    """Flat binary tree. ``feature == -1`` marks a leaf; rows with
    ``x[feature] <= threshold`` go left."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def __post_init__(self):
        for name, dtype in (("feature", int), ("threshold", float), ("left", int), ("right", int), ("value", float)):
            arr = np.array(getattr(self, name), dtype=dtype)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        node = np.zeros(X.shape[0], dtype=int)
        active = self.feature[node] >= 0
        while np.any(active):
            rows = np.flatnonzero(active)
            cur = node[rows]
            go_left = X[rows, self.feature[cur]] <= self.threshold[cur]
            node[rows] = np.where(go_left, self.left[cur], self.right[cur])
            active = self.feature[node] >= 0
        return self.value[node]

    def to_dict(self) -> dict:
        return {k: getattr(self, k).tolist() for k in ("feature", "threshold", "left", "right", "value")}

    @classmethod
    def from_dict(cls, data: dict) -> "Tree":
        return cls(**{k: data[k] for k in ("feature", "threshold", "left", "right", "value")})


@dataclass(frozen=True)
class GBTParams:
    base_score: float
    learning_rate: float
    trees: tuple[Tree, ...]
    loss_history: tuple[float, ...] = ()

    def to_dict(self) -> dict:
        return {
            "base_score": self.base_score,
            "learning_rate": self.learning_rate,
            "trees": [t.to_dict() for t in self.trees],
            "loss_history": list(self.loss_history),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GBTParams":
        return cls(
            float(data["base_score"]),
            float(data["learning_rate"]),
            tuple(Tree.from_dict(t) for t in data["trees"]),
            tuple(data.get("loss_history", ())),
        )


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    gain: float


def best_split(X, grad, hess, reg_lambda: float, min_samples_leaf: int) -> Split | None:
    """Exact greedy search over every feature and every gap between sorted values.

    Ties go to the lowest feature index, then the lowest threshold.
    Returns None if no admissible split has positive gain.
    """
    n, d = X.shape
    if n < 2 * min_samples_leaf:
        return None
    order = np.argsort(X, axis=0, kind="stable")
    xs = np.take_along_axis(X, order, axis=0)
    gl = np.cumsum(grad[order], axis=0)[:-1]
    hl = np.cumsum(hess[order], axis=0)[:-1]
    g_total = grad.sum()
    h_total = hess.sum()
    gr = g_total - gl
    hr = h_total - hl
    gain = gl ** 2 / (hl + reg_lambda) + gr ** 2 / (hr + reg_lambda) - g_total ** 2 / (h_total + reg_lambda)

    n_left = np.arange(1, n)[:, None]
    valid = (xs[:-1] < xs[1:]) & (n_left >= min_samples_leaf) & (n - n_left >= min_samples_leaf)
    gain = np.where(valid, gain, -np.inf)

    best: Split | None = None
    for j in range(d):
        k = int(np.argmax(gain[:, j]))
        g = gain[k, j]
        if not g > 0:
            continue
        if best is None or g > best.gain:
            lo, hi = xs[k, j], xs[k + 1, j]
            thr = 0.5 * (lo + hi)
            if not lo <= thr < hi:
                thr = lo
            best = Split(j, float(thr), float(g))
    return best


def build_tree(X, grad, hess, config: GBTConfig) -> Tree:
    feature, threshold, left, right, value = [], [], [], [], []

    def grow(idx: np.ndarray, depth: int) -> int:
        node = len(feature)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(-grad[idx].sum() / (hess[idx].sum() + config.reg_lambda))
        if depth >= config.max_depth:
            return node
        split = best_split(X[idx], grad[idx], hess[idx], config.reg_lambda, config.min_samples_leaf)
        if split is None:
            return node
        mask = X[idx, split.feature] <= split.threshold
        feature[node] = split.feature
        threshold[node] = split.threshold
        left[node] = grow(idx[mask], depth + 1)
        right[node] = grow(idx[~mask], depth + 1)
        return node

    grow(np.arange(X.shape[0]), 0)
    return Tree(feature, threshold, left, right, value)


def logistic_loss(y, margin) -> float:
    return float(np.mean(np.logaddexp(0.0, margin) - y * margin))


def train(X, y, config: GBTConfig) -> GBTParams:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    p = y.mean()
    base = float(np.log(p / (1.0 - p)))
    margin = np.full(X.shape[0], base)
    trees = []
    history = [logistic_loss(y, margin)]
    for _ in range(config.trees):
        prob = sigmoid(margin)
        grad = prob - y
        hess = prob * (1.0 - prob)
        tree = build_tree(X, grad, hess, config)
        trees.append(tree)
        margin = margin + config.learning_rate * tree.predict(X)
        history.append(logistic_loss(y, margin))
    return GBTParams(base, config.learning_rate, tuple(trees), tuple(history))


def predict_margin(params: GBTParams, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    margin = np.full(X.shape[0], params.base_score)
    for tree in params.trees:
        margin = margin + params.learning_rate * tree.predict(X)
    return margin
