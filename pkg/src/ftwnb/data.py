"""Dataset container, CSV ingestion/serialization, splitting and NLoS subsampling.

The canonical on-disk format is a UTF-8 CSV: header row, one feature column
per schema entry (in order), and a final integer column ``NLOS`` where
1 marks an NLoS measurement.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

import numpy as np

# Default feature schema for a 12-feature UWB measurement record.
DEFAULT_SCHEMA = (
    "RANGE",
    "RSS",
    "FP_INDEX",
    "F1_AMP",
    "F2_AMP",
    "F3_AMP",
    "FPPL",
    "RX_POWER",
    "POWER_RATIO",
    "NOISE_STD",
    "MAX_NOISE",
    "PREAMBLE_COUNT",
)

LABEL_COLUMN = "NLOS"


class ClassLabel(IntEnum):
    LOS = 0
    NLOS = 1


class SchemaError(ValueError):
    """CSV header does not match the expected feature schema."""


class ParseError(ValueError):
    """A CSV cell could not be interpreted as a feature value or label."""


@dataclass(frozen=True)
class LabeledSample:
    features: np.ndarray
    label: ClassLabel


@dataclass(frozen=True)
class Dataset:
    """Immutable labeled feature matrix.

    ``features`` is (n, len(schema)) float64, ``labels`` is (n,) int with
    0 = LoS and 1 = NLoS. Arrays are marked read-only after validation.
    """

    schema: tuple[str, ...]
    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        schema = tuple(self.schema)
        feats = np.ascontiguousarray(np.asarray(self.features, dtype=float))
        labs = np.ascontiguousarray(np.asarray(self.labels, dtype=np.int64))
        if feats.ndim != 2 or feats.shape[1] != len(schema):
            raise ValueError(
                f"feature matrix shape {feats.shape} does not match schema of length {len(schema)}"
            )
        if labs.shape != (feats.shape[0],):
            raise ValueError("labels must be one per sample")
        if not np.all(np.isfinite(feats)):
            raise ValueError("all feature values must be finite")
        if labs.size and not np.isin(labs, (0, 1)).all():
            raise ValueError("labels must be 0 (LoS) or 1 (NLoS)")
        feats.setflags(write=False)
        labs.setflags(write=False)
        object.__setattr__(self, "schema", schema)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labs)

    def __len__(self) -> int:
        return self.features.shape[0]

    def __iter__(self):
        for row, lab in zip(self.features, self.labels):
            yield LabeledSample(features=row, label=ClassLabel(int(lab)))

    @property
    def n_los(self) -> int:
        return int(np.sum(self.labels == ClassLabel.LOS))

    @property
    def n_nlos(self) -> int:
        return int(np.sum(self.labels == ClassLabel.NLOS))

    @property
    def counts(self) -> dict[ClassLabel, int]:
        return {ClassLabel.LOS: self.n_los, ClassLabel.NLOS: self.n_nlos}

    def take(self, indices: np.ndarray) -> "Dataset":
        """Dataset restricted to the given row indices (order preserved)."""
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.schema, self.features[idx], self.labels[idx])

    def select_features(self, feature_indices) -> "Dataset":
        """Dataset restricted to a subset of feature columns."""
        idx = list(feature_indices)
        schema = tuple(self.schema[i] for i in idx)
        return Dataset(schema, self.features[:, idx], self.labels)


def load_schema(path: str | Path) -> tuple[str, ...]:
    """Read a schema override file: one feature name per line, '#' comments."""
    names = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            names.append(line)
    if not names:
        raise SchemaError(f"schema file {path} contains no feature names")
    return tuple(names)


def load_dataset(path: str | Path, schema: tuple[str, ...] = DEFAULT_SCHEMA) -> Dataset:
    """Parse a CSV file into a Dataset, preserving row order.

    Raises SchemaError when the header does not match ``schema`` +
    ``NLOS``, and ParseError (with the 1-based data row number) for
    non-numeric cells or labels outside {0, 1}.
    """
    schema = tuple(schema)
    expected = list(schema) + [LABEL_COLUMN]
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected a header row") from None
        header = [h.strip() for h in header]
        if header != expected:
            missing = [c for c in expected if c not in header]
            extra = [c for c in header if c not in expected]
            detail = []
            if missing:
                detail.append(f"missing column(s) {missing}")
            if extra:
                detail.append(f"unexpected column(s) {extra}")
            if not detail:
                detail.append(f"column order {header} != {expected}")
            raise SchemaError(f"{path}: header mismatch: " + "; ".join(detail))

        feats: list[list[float]] = []
        labels: list[int] = []
        for row_num, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != len(expected):
                raise ParseError(f"{path}: row {row_num}: expected {len(expected)} cells, got {len(row)}")
            try:
                values = [float(c) for c in row[:-1]]
            except ValueError:
                raise ParseError(f"{path}: row {row_num}: non-numeric feature value") from None
            cell = row[-1].strip()
            if cell not in ("0", "1"):
                raise ParseError(f"{path}: row {row_num}: label {cell!r} not in {{0, 1}}")
            feats.append(values)
            labels.append(int(cell))

    features = np.array(feats, dtype=float).reshape(len(feats), len(schema))
    return Dataset(schema, features, np.array(labels, dtype=np.int64))


def save_dataset(dataset: Dataset, path: str | Path) -> None:
    """Write a Dataset in the canonical CSV format at full float precision."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(dataset.schema) + [LABEL_COLUMN])
        for row, lab in zip(dataset.features, dataset.labels):
            # repr round-trips float64 exactly
            writer.writerow([repr(float(v)) for v in row] + [int(lab)])


def subsample_ratio(dataset: Dataset, ratio: float, seed: int) -> Dataset:
    """Downsample NLoS so that the NLoS:LoS count ratio equals ``ratio``.

    LoS samples are kept unchanged; NLoS samples are drawn uniformly
    without replacement. Retained rows keep their original order.
    """
    if not 0.0 < ratio <= 1.0:
        raise ValueError(f"ratio must be in (0, 1], got {ratio}")
    target = int(round(ratio * dataset.n_los))
    nlos_idx = np.flatnonzero(dataset.labels == ClassLabel.NLOS)
    if target > nlos_idx.size:
        raise ValueError(
            f"insufficient NLoS samples: need {target} for ratio {ratio}, have {nlos_idx.size}"
        )
    rng = np.random.default_rng(seed)
    keep_nlos = rng.choice(nlos_idx, size=target, replace=False)
    los_idx = np.flatnonzero(dataset.labels == ClassLabel.LOS)
    keep = np.sort(np.concatenate([los_idx, keep_nlos]))
    return dataset.take(keep)


def split_train_test(
    dataset: Dataset,
    test_fraction: float,
    seed: int,
    stratified: bool = True,
) -> tuple[Dataset, Dataset]:
    """Disjoint train/test split; per-class fractions preserved when stratified."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    n = len(dataset)
    rng = np.random.default_rng(seed)

    if stratified:
        test_parts = []
        for label in (ClassLabel.LOS, ClassLabel.NLOS):
            cls_idx = np.flatnonzero(dataset.labels == label)
            n_test = int(round(test_fraction * cls_idx.size))
            if n_test == 0 or n_test == cls_idx.size:
                raise ValueError(
                    f"empty split: class {label.name} would place {n_test} of "
                    f"{cls_idx.size} samples in the test side"
                )
            test_parts.append(rng.permutation(cls_idx)[:n_test])
        test_idx = np.sort(np.concatenate(test_parts))
    else:
        n_test = int(round(test_fraction * n))
        if n_test == 0 or n_test == n:
            raise ValueError(f"empty split: {n_test} of {n} samples in the test side")
        test_idx = np.sort(rng.permutation(n)[:n_test])

    mask = np.zeros(n, dtype=bool)
    mask[test_idx] = True
    train_idx = np.flatnonzero(~mask)
    return dataset.take(train_idx), dataset.take(test_idx)
