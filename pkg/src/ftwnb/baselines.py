"""KNN and decision-tree baseline classifiers, both deterministic by construction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classifiers import Prediction, _finish
from .data import ClassLabel, Dataset

# smoothing for the log_joint of count-based scores, keeps logs finite
_EPS = 1e-12


def _count_prediction(n_nlos: float, n_total: float) -> Prediction:
    p_nlos = n_nlos / n_total
    log_joint = np.log(np.array([1.0 - p_nlos, p_nlos]) + _EPS)
    pred = _finish(log_joint)
    # report the raw vote/leaf fraction, not the smoothed softmax
    return Prediction(label=pred.label, log_joint=log_joint, score=float(p_nlos))


def knn_predict(
    train_x: np.ndarray, train_y: np.ndarray, test_x: np.ndarray, k: int
) -> list[Prediction]:
    """Majority vote of the k nearest training points by Euclidean distance.

    Features are z-scored with training statistics. Distance ties break
    toward the lower training index; vote ties go to LoS.
    """
    train_x = np.asarray(train_x, dtype=float)
    test_x = np.asarray(test_x, dtype=float)
    train_y = np.asarray(train_y, dtype=np.int64)
    if not 1 <= k <= train_x.shape[0]:
        raise ValueError(f"k must be in [1, {train_x.shape[0]}], got {k}")

    mean = train_x.mean(axis=0)
    std = train_x.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    zt = (train_x - mean) / std
    zq = (test_x - mean) / std

    preds = []
    for q in zq:
        d2 = np.sum((zt - q) ** 2, axis=1)
        neighbors = np.argsort(d2, kind="stable")[:k]  # stable: lower index wins ties
        votes_nlos = int(np.sum(train_y[neighbors] == ClassLabel.NLOS))
        preds.append(_count_prediction(votes_nlos, k))
    return preds


@dataclass(frozen=True)
class _Node:
    feature: int | None  # None marks a leaf
    threshold: float
    left: "_Node | None"
    right: "_Node | None"
    n_nlos: int
    n_total: int


def _gini(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return float(1.0 - np.sum(p * p))


def _best_split(x: np.ndarray, y: np.ndarray) -> tuple[int, float, float] | None:
    """Lowest weighted-Gini axis-aligned split, ties to lower feature then threshold."""
    n = y.size
    best: tuple[float, int, float] | None = None
    for f in range(x.shape[1]):
        order = np.argsort(x[:, f], kind="stable")
        xs = x[order, f]
        ys = y[order]
        nlos_prefix = np.cumsum(ys == ClassLabel.NLOS)
        boundaries = np.flatnonzero(np.diff(xs) > 0)  # split between distinct values
        for b in boundaries:
            n_left = b + 1
            left_nlos = nlos_prefix[b]
            right_nlos = nlos_prefix[-1] - left_nlos
            left = np.array([n_left - left_nlos, left_nlos], dtype=float)
            right = np.array([(n - n_left) - right_nlos, right_nlos], dtype=float)
            score = (n_left * _gini(left) + (n - n_left) * _gini(right)) / n
            threshold = (xs[b] + xs[b + 1]) / 2.0
            if best is None or score < best[0] - 1e-12:
                best = (score, f, threshold)
    if best is None:
        return None
    return best[1], best[2], best[0]


def _grow(x: np.ndarray, y: np.ndarray, depth: int, max_depth: int) -> _Node:
    n_nlos = int(np.sum(y == ClassLabel.NLOS))
    n_total = y.size
    if depth >= max_depth or n_total < 2 or n_nlos in (0, n_total):
        return _Node(None, 0.0, None, None, n_nlos, n_total)
    split = _best_split(x, y)
    if split is None:  # all rows identical
        return _Node(None, 0.0, None, None, n_nlos, n_total)
    f, threshold, parent_score = split
    go_left = x[:, f] <= threshold
    left = _grow(x[go_left], y[go_left], depth + 1, max_depth)
    right = _grow(x[~go_left], y[~go_left], depth + 1, max_depth)
    return _Node(f, threshold, left, right, n_nlos, n_total)


def decision_tree_predict(
    train_x: np.ndarray, train_y: np.ndarray, test_x: np.ndarray, max_depth: int = 5
) -> list[Prediction]:
    """Gini-impurity binary tree with leaf-majority prediction.

    ``max_depth = 0`` degenerates to the constant majority-class predictor.
    """
    train_x = np.asarray(train_x, dtype=float)
    train_y = np.asarray(train_y, dtype=np.int64)
    test_x = np.asarray(test_x, dtype=float)
    if max_depth < 0:
        raise ValueError(f"max_depth must be >= 0, got {max_depth}")
    if train_y.size == 0:
        raise ValueError("training data must be non-empty")
    root = _grow(train_x, train_y, 0, max_depth)

    preds = []
    for q in test_x:
        node = root
        while node.feature is not None:
            node = node.left if q[node.feature] <= node.threshold else node.right
        preds.append(_count_prediction(node.n_nlos, node.n_total))
    return preds


def baseline_predict(kind: str, train: Dataset, test: Dataset, params: dict) -> list[Prediction]:
    """Dispatch to one of the baseline classifiers: ``"KNN"`` or ``"DT"``."""
    if kind == "KNN":
        return knn_predict(train.features, train.labels, test.features, k=params.get("k", 5))
    if kind == "DT":
        return decision_tree_predict(
            train.features, train.labels, test.features, max_depth=params.get("max_depth", 5)
        )
    raise ValueError(f"unknown baseline kind {kind!r}, expected 'KNN' or 'DT'")
