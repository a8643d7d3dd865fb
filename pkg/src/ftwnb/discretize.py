"""Equal-frequency binning and class-conditional probability tables.

The classifiers operate on discrete per-feature bins; this module turns
continuous feature columns into bin indices and estimates the class priors
and smoothed per-bin conditionals the decision rules consume.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import ClassLabel, Dataset

N_CLASSES = 2


@dataclass(frozen=True)
class Discretizer:
    """Per-feature interior bin edges, strictly increasing.

    A feature with edges (e1, ..., em) has m+1 bins: values below e1 map
    to bin 0, values in [ej, ej+1) to bin j, and values >= em to bin m.
    Out-of-range test values clamp into the first/last bin by construction.
    """

    edges: tuple[np.ndarray, ...]

    def __post_init__(self):
        frozen = []
        for i, e in enumerate(self.edges):
            arr = np.asarray(e, dtype=float)
            if arr.ndim != 1:
                raise ValueError(f"feature {i}: edges must be one-dimensional")
            if arr.size > 1 and not np.all(np.diff(arr) > 0):
                raise ValueError(f"feature {i}: edges must be strictly increasing")
            arr.setflags(write=False)
            frozen.append(arr)
        object.__setattr__(self, "edges", tuple(frozen))

    @property
    def n_features(self) -> int:
        return len(self.edges)

    def bin_count(self, feature: int) -> int:
        return len(self.edges[feature]) + 1

    @property
    def bin_counts(self) -> tuple[int, ...]:
        return tuple(len(e) + 1 for e in self.edges)

    def transform_row(self, values) -> np.ndarray:
        """Bin indices for one feature vector. Ties on an edge go to the higher bin."""
        values = np.asarray(values, dtype=float)
        if values.shape != (self.n_features,):
            raise ValueError(f"expected {self.n_features} values, got shape {values.shape}")
        return np.array(
            [np.searchsorted(self.edges[i], values[i], side="right") for i in range(self.n_features)],
            dtype=np.int64,
        )

    def transform(self, features: np.ndarray) -> np.ndarray:
        """Bin indices for a (n, n_features) matrix."""
        features = np.asarray(features, dtype=float)
        if features.ndim != 2 or features.shape[1] != self.n_features:
            raise ValueError(f"expected (n, {self.n_features}) matrix, got shape {features.shape}")
        out = np.empty(features.shape, dtype=np.int64)
        for i in range(self.n_features):
            out[:, i] = np.searchsorted(self.edges[i], features[:, i], side="right")
        return out


def fit_bins(train: Dataset, n_bins: int = 10) -> Discretizer:
    """Equal-frequency (quantile) edges per feature, from training data only.

    Duplicate quantiles collapse, so low-cardinality features may end up
    with fewer than ``n_bins`` effective bins; a constant feature collapses
    to a single bin.
    """
    if len(train) == 0:
        raise ValueError("cannot fit bins on an empty dataset")
    if n_bins < 1:
        raise ValueError(f"n_bins must be >= 1, got {n_bins}")
    qs = np.arange(1, n_bins) / n_bins
    edges = []
    for i in range(len(train.schema)):
        col = train.features[:, i]
        cand = np.unique(np.quantile(col, qs)) if qs.size else np.array([], dtype=float)
        # an edge at or below the column minimum would create an empty bottom bin
        edges.append(cand[cand > col.min()])
    return Discretizer(tuple(edges))


@dataclass(frozen=True)
class CptModel:
    """Class priors plus per-feature, per-class conditional bin probabilities.

    ``tables[i]`` has shape (2, bins_i) with rows ordered (LoS, NLoS); every
    row sums to 1 and is strictly positive thanks to Laplace smoothing.
    """

    discretizer: Discretizer
    priors: np.ndarray
    tables: tuple[np.ndarray, ...]
    laplace_alpha: float

    def __post_init__(self):
        priors = np.asarray(self.priors, dtype=float)
        if priors.shape != (N_CLASSES,):
            raise ValueError(f"priors must have shape ({N_CLASSES},)")
        if abs(priors.sum() - 1.0) > 1e-9 or np.any(priors < 0):
            raise ValueError("priors must be non-negative and sum to 1")
        if len(self.tables) != self.discretizer.n_features:
            raise ValueError("one conditional table required per feature")
        frozen = []
        for i, t in enumerate(self.tables):
            table = np.asarray(t, dtype=float)
            if table.shape != (N_CLASSES, self.discretizer.bin_count(i)):
                raise ValueError(
                    f"feature {i}: table shape {table.shape} != "
                    f"({N_CLASSES}, {self.discretizer.bin_count(i)})"
                )
            if np.any(table <= 0) or np.any(table > 1):
                raise ValueError(f"feature {i}: conditional entries must lie in (0, 1]")
            if np.max(np.abs(table.sum(axis=1) - 1.0)) > 1e-9:
                raise ValueError(f"feature {i}: conditional rows must sum to 1")
            table.setflags(write=False)
            frozen.append(table)
        priors.setflags(write=False)
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "tables", tuple(frozen))

    @property
    def n_features(self) -> int:
        return self.discretizer.n_features

    def with_tables(self, tables) -> "CptModel":
        return CptModel(self.discretizer, self.priors, tuple(tables), self.laplace_alpha)

    def log_tables(self) -> list[np.ndarray]:
        return [np.log(t) for t in self.tables]

    def to_dict(self) -> dict:
        return {
            "priors": [float(p) for p in self.priors],
            "laplace_alpha": float(self.laplace_alpha),
            "edges": [[float(v) for v in e] for e in self.discretizer.edges],
            "tables": [[[float(v) for v in row] for row in t] for t in self.tables],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CptModel":
        disc = Discretizer(tuple(np.array(e, dtype=float) for e in d["edges"]))
        tables = tuple(np.array(t, dtype=float) for t in d["tables"])
        return cls(disc, np.array(d["priors"], dtype=float), tables, float(d["laplace_alpha"]))


def fit_cpt(
    discretizer: Discretizer,
    binned: np.ndarray,
    labels: np.ndarray,
    laplace_alpha: float = 1.0,
) -> CptModel:
    """Estimate priors and Laplace-smoothed conditionals from binned training data.

    Each table entry is (count(bin, class) + alpha) / (count(class) + alpha * B)
    with B the feature's effective bin count.
    """
    if laplace_alpha <= 0:
        raise ValueError(f"laplace_alpha must be positive, got {laplace_alpha}")
    binned = np.asarray(binned, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    if binned.ndim != 2 or binned.shape[0] != labels.shape[0]:
        raise ValueError("binned matrix and labels must agree on sample count")
    class_counts = np.array(
        [np.sum(labels == ClassLabel.LOS), np.sum(labels == ClassLabel.NLOS)], dtype=float
    )
    if np.any(class_counts == 0):
        missing = ClassLabel.LOS if class_counts[0] == 0 else ClassLabel.NLOS
        raise ValueError(f"class {missing.name} absent from training data")

    priors = class_counts / class_counts.sum()
    tables = []
    for i in range(discretizer.n_features):
        b = discretizer.bin_count(i)
        table = np.empty((N_CLASSES, b), dtype=float)
        for lab in (ClassLabel.LOS, ClassLabel.NLOS):
            counts = np.bincount(binned[labels == lab, i], minlength=b).astype(float)
            table[lab] = (counts + laplace_alpha) / (class_counts[lab] + laplace_alpha * b)
        tables.append(table)
    return CptModel(discretizer, priors, tuple(tables), laplace_alpha)


def save_cpt(model: CptModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model.to_dict(), indent=1), encoding="utf-8")


def load_cpt(path: str | Path) -> CptModel:
    return CptModel.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
