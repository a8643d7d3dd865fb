"""Confusion matrix, summary rates, ROC/AUC and wall-clock timing.

Precision/recall/accuracy treat LoS as the positive class (TP counts LoS
correctly classified); the ROC curve treats NLoS as positive, since NLoS
detection is the operational goal. Both orientations appear in reports.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .data import ClassLabel


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int  # LoS classified LoS
    fn: int  # LoS classified NLoS
    fp: int  # NLoS classified LoS
    tn: int  # NLoS classified NLoS

    def __post_init__(self):
        for name in ("tp", "fn", "fp", "tn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fn": self.fn, "fp": self.fp, "tn": self.tn}


@dataclass(frozen=True)
class MetricsReport:
    precision: float
    recall: float
    accuracy: float
    los_correct_rate: float
    nlos_correct_rate: float
    auc: float | None = None
    runtime_seconds: float | None = None
    # names of rates whose denominator was zero (reported as 0)
    undefined_rates: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "accuracy": self.accuracy,
            "los_correct_rate": self.los_correct_rate,
            "nlos_correct_rate": self.nlos_correct_rate,
            "auc": self.auc,
            "runtime_seconds": self.runtime_seconds,
            "undefined_rates": list(self.undefined_rates),
        }


def _as_label_array(values) -> np.ndarray:
    return np.array([int(v) for v in values], dtype=np.int64)


def confusion(truth, pred) -> ConfusionMatrix:
    """Count the four cells with LoS as the positive class."""
    t = _as_label_array(truth)
    p = _as_label_array(pred)
    if t.shape != p.shape:
        raise ValueError(f"truth and prediction lengths differ: {t.size} vs {p.size}")
    if t.size == 0:
        raise ValueError("cannot build a confusion matrix from empty inputs")
    los, nlos = ClassLabel.LOS, ClassLabel.NLOS
    return ConfusionMatrix(
        tp=int(np.sum((t == los) & (p == los))),
        fn=int(np.sum((t == los) & (p == nlos))),
        fp=int(np.sum((t == nlos) & (p == los))),
        tn=int(np.sum((t == nlos) & (p == nlos))),
    )


def summary_metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Derived rates; a zero denominator yields rate 0 plus an undefined flag."""
    if cm.total == 0:
        raise ValueError("confusion matrix is empty")
    undefined = []

    def rate(num: int, den: int, name: str) -> float:
        if den == 0:
            undefined.append(name)
            return 0.0
        return num / den

    precision = rate(cm.tp, cm.tp + cm.fp, "precision")
    recall = rate(cm.tp, cm.tp + cm.fn, "recall")
    nlos_correct = rate(cm.tn, cm.fp + cm.tn, "nlos_correct_rate")
    return MetricsReport(
        precision=precision,
        recall=recall,
        accuracy=(cm.tp + cm.tn) / cm.total,
        los_correct_rate=recall,
        nlos_correct_rate=nlos_correct,
        undefined_rates=tuple(undefined),
    )


def roc_auc(scores, truth) -> tuple[list[tuple[float, float]], float]:
    """ROC points and trapezoidal AUC with NLoS as the positive class.

    Sweeps every distinct score threshold; tied scores collapse into a single
    step, which makes the trapezoidal area equal the Mann-Whitney statistic
    with ties counted 1/2.
    """
    s = np.asarray(scores, dtype=float)
    t = _as_label_array(truth)
    if s.shape != t.shape:
        raise ValueError(f"scores and truth lengths differ: {s.size} vs {t.size}")
    n_pos = int(np.sum(t == ClassLabel.NLOS))
    n_neg = int(np.sum(t == ClassLabel.LOS))
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC requires both classes present in the truth labels")

    order = np.argsort(-s, kind="stable")
    s_sorted = s[order]
    pos_sorted = (t[order] == ClassLabel.NLOS).astype(float)

    distinct = np.flatnonzero(np.diff(s_sorted) != 0)
    threshold_idx = np.concatenate([distinct, [s.size - 1]])
    tps = np.cumsum(pos_sorted)[threshold_idx]
    fps = 1 + threshold_idx - tps

    tpr = np.concatenate([[0.0], tps / n_pos])
    fpr = np.concatenate([[0.0], fps / n_neg])
    auc = float(np.trapezoid(tpr, fpr))
    points = [(float(x), float(y)) for x, y in zip(fpr, tpr)]
    return points, auc


def save_roc_csv(points: list[tuple[float, float]], path: str | Path) -> None:
    """Two-column (FPR, TPR) CSV for external plotting."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fpr", "tpr"])
        writer.writerows(points)


def timed(run: Callable[[], object]) -> tuple[object, float]:
    """Run a closure and return (result, wall-clock seconds).

    Monotonic clock; absolute values are hardware-dependent and are never
    compared against published timings.
    """
    start = time.perf_counter()
    result = run()
    return result, time.perf_counter() - start
