"""NB / WNB / FT-WNB classifiers and the conditional-probability fine-tuning rules.

Training runs in two phases: phase 1 fits the discretizer, the conditional
probability tables and the attribute weights; phase 2 walks the training
instances in order and nudges the tables of every misclassified instance,
raising the true class's conditional at the observed bins and lowering the
predicted class's, with step sizes scaled by the prior gap between the two
classes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .data import ClassLabel, Dataset
from .discretize import CptModel, Discretizer, fit_bins, fit_cpt
from .features import AttributeWeights, attribute_weights

# Conditional entries are clamped here before renormalization so the tables
# never leave the open simplex.
PROB_FLOOR = 1e-6


@dataclass(frozen=True)
class Prediction:
    """Predicted label with per-class log joint and the NLoS posterior."""

    label: ClassLabel
    log_joint: np.ndarray
    score: float


@dataclass(frozen=True)
class FtWnbConfig:
    n_bins: int = 10
    laplace_alpha: float = 1.0
    alpha: float = 0.5
    beta: float = 0.1
    finetune_cap: int = 40
    max_epochs: int = 50
    weights: str = "mi"  # "mi" or "unit"
    weight_floor: float = 0.01
    shuffle_seed: int | None = None

    def validate(self) -> None:
        if self.n_bins < 1:
            raise ValueError(f"n_bins must be >= 1, got {self.n_bins}")
        if self.laplace_alpha <= 0:
            raise ValueError(f"laplace_alpha must be positive, got {self.laplace_alpha}")
        if not 0.0 < self.alpha < 1.0 or not 0.0 < self.beta < 1.0:
            raise ValueError(f"alpha and beta must lie in (0, 1), got {self.alpha}, {self.beta}")
        if self.finetune_cap < 0:
            raise ValueError(f"finetune_cap must be >= 0, got {self.finetune_cap}")
        if self.max_epochs < 1:
            raise ValueError(f"max_epochs must be >= 1, got {self.max_epochs}")
        if self.weights not in ("mi", "unit"):
            raise ValueError(f"weights must be 'mi' or 'unit', got {self.weights!r}")
        if self.weight_floor <= 0:
            raise ValueError(f"weight_floor must be positive, got {self.weight_floor}")


def _weight_values(w) -> np.ndarray:
    return np.asarray(w.values if isinstance(w, AttributeWeights) else w, dtype=float)


def _check_bins(cpt: CptModel, bins: np.ndarray) -> np.ndarray:
    bins = np.asarray(bins, dtype=np.int64)
    if bins.shape != (cpt.n_features,):
        raise ValueError(f"expected {cpt.n_features} bin indices, got shape {bins.shape}")
    for i, b in enumerate(bins):
        if not 0 <= b < cpt.discretizer.bin_count(i):
            raise ValueError(f"feature {i}: bin index {b} out of range")
    return bins


def _finish(log_joint: np.ndarray) -> Prediction:
    # exact ties go to LoS, the majority class
    label = ClassLabel.NLOS if log_joint[ClassLabel.NLOS] > log_joint[ClassLabel.LOS] else ClassLabel.LOS
    shifted = np.exp(log_joint - log_joint.max())
    score = float(shifted[ClassLabel.NLOS] / shifted.sum())
    return Prediction(label=label, log_joint=log_joint, score=score)


def wnb_predict(cpt: CptModel, weights, bins) -> Prediction:
    """Attribute-weighted naive Bayes: argmax_l P(l) * prod_i P(X_i|l)^w(i)."""
    bins = _check_bins(cpt, bins)
    w = _weight_values(weights)
    if w.shape != (cpt.n_features,):
        raise ValueError(f"expected {cpt.n_features} weights, got shape {w.shape}")
    log_joint = np.log(cpt.priors).copy()
    for i, b in enumerate(bins):
        log_joint += w[i] * np.log(cpt.tables[i][:, b])
    return _finish(log_joint)


def nb_predict(cpt: CptModel, bins) -> Prediction:
    """Unweighted naive Bayes; the weighted rule with all weights equal to 1."""
    return wnb_predict(cpt, np.ones(cpt.n_features), bins)


def predict_batch(cpt: CptModel, weights, binned: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized WNB over a (n, n_features) binned matrix.

    Returns (labels, nlos_scores). Matches wnb_predict sample-for-sample.
    """
    binned = np.asarray(binned, dtype=np.int64)
    w = _weight_values(weights)
    log_joint = np.tile(np.log(cpt.priors), (binned.shape[0], 1))
    for i in range(cpt.n_features):
        log_joint += w[i] * np.log(cpt.tables[i][:, binned[:, i]]).T
    labels = (log_joint[:, ClassLabel.NLOS] > log_joint[:, ClassLabel.LOS]).astype(np.int64)
    shifted = np.exp(log_joint - log_joint.max(axis=1, keepdims=True))
    scores = shifted[:, ClassLabel.NLOS] / shifted.sum(axis=1)
    return labels, scores


def error_term(priors, l_true: ClassLabel, l_pred: ClassLabel) -> float:
    """Absolute prior gap |P(l_true) - P(l_pred)| driving the update magnitude."""
    priors = np.asarray(priors, dtype=float)
    return float(abs(priors[l_true] - priors[l_pred]))


def finetune_deltas(
    cpt: CptModel,
    bins,
    l_true: ClassLabel,
    l_pred: ClassLabel,
    alpha: float,
    beta: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-feature step sizes for one misclassified instance.

    For feature i with observed bin b:
      step_true(i) = beta * (alpha * max_bin P(.|l_true) - P(b|l_true)) * e
      step_pred(i) = beta * (alpha * P(b|l_pred) - min_bin P(.|l_pred)) * e
    where e is the prior gap. Steps may be negative; they are applied as is.
    """
    if not 0.0 < alpha < 1.0 or not 0.0 < beta < 1.0:
        raise ValueError(f"alpha and beta must lie in (0, 1), got {alpha}, {beta}")
    if l_true == l_pred:
        raise ValueError("fine-tuning applies only to misclassified instances")
    bins = _check_bins(cpt, bins)
    e = error_term(cpt.priors, l_true, l_pred)
    step_true = np.empty(cpt.n_features)
    step_pred = np.empty(cpt.n_features)
    for i, b in enumerate(bins):
        row_true = cpt.tables[i][l_true]
        row_pred = cpt.tables[i][l_pred]
        step_true[i] = beta * (alpha * row_true.max() - row_true[b]) * e
        step_pred[i] = beta * (alpha * row_pred[b] - row_pred.min()) * e
    return step_true, step_pred


def finetune_step(
    cpt: CptModel,
    bins,
    l_true: ClassLabel,
    l_pred: ClassLabel,
    alpha: float,
    beta: float,
) -> CptModel:
    """One fine-tuning update: shift mass toward l_true at the observed bins.

    After the additive updates each touched (feature, class) row is clamped
    to a positive floor and renormalized to sum 1.
    """
    bins = _check_bins(cpt, bins)
    step_true, step_pred = finetune_deltas(cpt, bins, l_true, l_pred, alpha, beta)
    tables = []
    for i, b in enumerate(bins):
        table = np.array(cpt.tables[i])
        table[l_true, b] += step_true[i]
        table[l_pred, b] -= step_pred[i]
        table = np.maximum(table, PROB_FLOOR)
        table /= table.sum(axis=1, keepdims=True)
        tables.append(table)
    return cpt.with_tables(tables)


@dataclass(frozen=True)
class FtWnbModel:
    """Trained FT-WNB classifier: tuned tables, weights, and hyperparameters."""

    feature_names: tuple[str, ...]
    cpt: CptModel
    weights: AttributeWeights
    alpha: float
    beta: float
    finetune_cap: int
    epochs_run: int = 0
    finetune_applied: int = 0

    def to_dict(self) -> dict:
        return {
            "feature_names": list(self.feature_names),
            "cpt": self.cpt.to_dict(),
            "weights": [float(v) for v in self.weights.values],
            "alpha": float(self.alpha),
            "beta": float(self.beta),
            "finetune_cap": int(self.finetune_cap),
            "epochs_run": int(self.epochs_run),
            "finetune_applied": int(self.finetune_applied),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FtWnbModel":
        return cls(
            feature_names=tuple(d["feature_names"]),
            cpt=CptModel.from_dict(d["cpt"]),
            weights=AttributeWeights(np.array(d["weights"], dtype=float)),
            alpha=float(d["alpha"]),
            beta=float(d["beta"]),
            finetune_cap=int(d["finetune_cap"]),
            epochs_run=int(d["epochs_run"]),
            finetune_applied=int(d["finetune_applied"]),
        )


def ftwnb_train(train: Dataset, cfg: FtWnbConfig = FtWnbConfig()) -> FtWnbModel:
    """Train FT-WNB: fit tables and weights, then fine-tune on misclassified instances.

    Phase 2 makes up to ``max_epochs`` passes in dataset order (optionally
    shuffled once by ``shuffle_seed``), re-predicting each instance against
    the current tables and updating on every miss. It stops early when a
    full pass is miss-free or once ``finetune_cap`` updates have been spent.
    """
    cfg.validate()
    if train.n_los == 0 or train.n_nlos == 0:
        raise ValueError("training data must contain both LoS and NLoS samples")

    disc = fit_bins(train, cfg.n_bins)
    binned = disc.transform(train.features)
    cpt = fit_cpt(disc, binned, train.labels, cfg.laplace_alpha)
    if cfg.weights == "mi":
        weights = attribute_weights(binned, train.labels, cfg.weight_floor)
    else:
        weights = AttributeWeights(np.ones(len(train.schema)))

    order = np.arange(len(train))
    if cfg.shuffle_seed is not None:
        order = np.random.default_rng(cfg.shuffle_seed).permutation(order)

    epochs_run = 0
    applied = 0
    for _ in range(cfg.max_epochs):
        if applied >= cfg.finetune_cap:
            break
        epochs_run += 1
        misses = 0
        cap_hit = False
        pos = 0
        while pos < order.size:
            # tables are constant between updates, so predict the remaining
            # stretch in one shot and jump to its first miss
            chunk = order[pos:]
            pred_labels, _ = predict_batch(cpt, weights, binned[chunk])
            wrong = np.flatnonzero(pred_labels != train.labels[chunk])
            if wrong.size == 0:
                break
            idx = int(chunk[wrong[0]])
            misses += 1
            cpt = finetune_step(
                cpt, binned[idx], ClassLabel(int(train.labels[idx])),
                ClassLabel(int(pred_labels[wrong[0]])), cfg.alpha, cfg.beta,
            )
            applied += 1
            pos += int(wrong[0]) + 1
            if applied >= cfg.finetune_cap:
                cap_hit = True
                break
        if misses == 0 or cap_hit:
            break

    return FtWnbModel(
        feature_names=train.schema,
        cpt=cpt,
        weights=weights,
        alpha=cfg.alpha,
        beta=cfg.beta,
        finetune_cap=cfg.finetune_cap,
        epochs_run=epochs_run,
        finetune_applied=applied,
    )


def ftwnb_predict(model: FtWnbModel, feature_vector) -> Prediction:
    """Discretize one feature vector with the frozen edges and classify it."""
    values = np.asarray(feature_vector, dtype=float)
    if values.shape != (len(model.feature_names),):
        raise ValueError(
            f"expected {len(model.feature_names)} feature values, got shape {values.shape}"
        )
    if not np.all(np.isfinite(values)):
        raise ValueError("feature values must be finite")
    bins = model.cpt.discretizer.transform_row(values)
    return wnb_predict(model.cpt, model.weights, bins)


def ftwnb_predict_batch(model: FtWnbModel, features: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ftwnb_predict over a feature matrix: (labels, nlos_scores)."""
    binned = model.cpt.discretizer.transform(np.asarray(features, dtype=float))
    return predict_batch(model.cpt, model.weights, binned)


def save_model(model: FtWnbModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model.to_dict(), indent=1), encoding="utf-8")


def load_model(path: str | Path) -> FtWnbModel:
    return FtWnbModel.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
