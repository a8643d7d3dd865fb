"""Mutual information, feature correlation, mRMR selection and attribute weights."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset


def mutual_information(x, y) -> float:
    """Plug-in mutual information (nats) between two discrete columns.

    Estimated from the empirical joint distribution; clamped at 0 against
    floating-point error.
    """
    x = np.asarray(x, dtype=np.int64).ravel()
    y = np.asarray(y, dtype=np.int64).ravel()
    if x.shape != y.shape:
        raise ValueError(f"column lengths differ: {x.shape[0]} vs {y.shape[0]}")
    if x.size == 0:
        raise ValueError("columns must be non-empty")
    _, xi = np.unique(x, return_inverse=True)
    _, yi = np.unique(y, return_inverse=True)
    nx, ny = xi.max() + 1, yi.max() + 1
    joint = np.zeros((nx, ny), dtype=float)
    np.add.at(joint, (xi, yi), 1.0)
    joint /= x.size
    px = joint.sum(axis=1)
    py = joint.sum(axis=0)
    nz = joint > 0
    mi = float(np.sum(joint[nz] * np.log(joint[nz] / np.outer(px, py)[nz])))
    return max(mi, 0.0)


@dataclass(frozen=True)
class CorrelationMatrix:
    """Symmetric Pearson correlation matrix over the schema features."""

    feature_names: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        n = len(self.feature_names)
        if vals.shape != (n, n):
            raise ValueError(f"matrix shape {vals.shape} != ({n}, {n})")
        vals.setflags(write=False)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "values", vals)


def correlation_matrix(dataset: Dataset) -> CorrelationMatrix:
    """Pairwise Pearson correlations; constant features correlate 0 with others."""
    if len(dataset) < 2:
        raise ValueError("correlation requires at least 2 samples")
    x = dataset.features
    centered = x - x.mean(axis=0)
    std = x.std(axis=0)
    safe = np.where(std > 0, std, 1.0)
    z = centered / safe
    corr = (z.T @ z) / len(dataset)
    corr = (corr + corr.T) / 2.0
    constant = std == 0
    corr[constant, :] = 0.0
    corr[:, constant] = 0.0
    np.fill_diagonal(corr, 1.0)
    corr = np.clip(corr, -1.0, 1.0)
    return CorrelationMatrix(dataset.schema, corr)


def mrmr_select(binned: np.ndarray, labels: np.ndarray, k: int) -> list[int]:
    """Greedy minimum-redundancy maximum-relevance feature selection.

    The first pick maximizes MI(feature; class); each later pick maximizes
    MI(f; class) - mean over selected s of MI(f; s) (difference criterion).
    Ties break toward the lower feature index.
    """
    binned = np.asarray(binned, dtype=np.int64)
    n_features = binned.shape[1]
    if not 1 <= k <= n_features:
        raise ValueError(f"k must be in [1, {n_features}], got {k}")
    relevance = np.array([mutual_information(binned[:, i], labels) for i in range(n_features)])

    selected = [int(np.argmax(relevance))]  # argmax returns the first maximum
    remaining = [i for i in range(n_features) if i != selected[0]]
    pair_mi: dict[tuple[int, int], float] = {}

    def mi_pair(a: int, b: int) -> float:
        key = (min(a, b), max(a, b))
        if key not in pair_mi:
            pair_mi[key] = mutual_information(binned[:, a], binned[:, b])
        return pair_mi[key]

    while len(selected) < k:
        scores = [
            relevance[f] - sum(mi_pair(f, s) for s in selected) / len(selected)
            for f in remaining
        ]
        best = remaining[int(np.argmax(scores))]
        selected.append(best)
        remaining.remove(best)
    return selected


@dataclass(frozen=True)
class AttributeWeights:
    """Per-feature positive weights, normalized to mean 1."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1:
            raise ValueError("weights must be one-dimensional")
        if np.any(vals <= 0):
            raise ValueError("all weights must be strictly positive")
        if abs(vals.mean() - 1.0) > 1e-9:
            raise ValueError("weights must average to 1")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.values.size


def attribute_weights(binned: np.ndarray, labels: np.ndarray, floor: float = 0.01) -> AttributeWeights:
    """Class-MI attribute weights, floored and rescaled to mean 1.

    raw(i) = max(MI(feature i; class), floor); weights = raw / mean(raw).
    The floor keeps uninformative features strictly positive so the weighted
    decision rule stays well-defined.
    """
    if floor <= 0:
        raise ValueError(f"floor must be positive, got {floor}")
    binned = np.asarray(binned, dtype=np.int64)
    raw = np.array(
        [max(mutual_information(binned[:, i], labels), floor) for i in range(binned.shape[1])]
    )
    return AttributeWeights(raw / raw.mean())
