"""Synthetic UWB measurement generator.

Ranges follow the additive time-of-arrival model: the reported distance is
the true distance plus zero-mean Gaussian noise, plus a non-negative blockage
bias under NLoS. The remaining features are class-conditional correlated
Gaussians whose correlation structure mimics what real captures show: the
early-path amplitudes and the first-path power level move together, received
power tracks signal strength, and noise statistics pair up.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .data import DEFAULT_SCHEMA, ClassLabel, Dataset


class ConfigError(ValueError):
    """Scenario parameters violate their constraints."""


@dataclass(frozen=True)
class ScenarioConfig:
    """Parameters of one synthetic measurement environment.

    ``feature_means``/``feature_sigmas`` are (2, n_features) arrays indexed
    by class (LoS row 0, NLoS row 1). ``class_separation`` scales the mean
    offset of the NLoS class away from the LoS means: 0 collapses the class
    means onto each other, 1 uses the configured offsets as given.
    """

    name: str
    true_distance_range: tuple[float, float]
    noise_sigma: float
    nlos_bias: tuple[float, float]  # (mean, sigma) of the blockage bias, truncated at 0
    feature_means: np.ndarray
    feature_sigmas: np.ndarray
    correlation_target: np.ndarray
    class_separation: float = 1.0
    feature_names: tuple[str, ...] = DEFAULT_SCHEMA

    def __post_init__(self):
        names = tuple(self.feature_names)
        d = len(names)
        means = np.asarray(self.feature_means, dtype=float)
        sigmas = np.asarray(self.feature_sigmas, dtype=float)
        corr = np.asarray(self.correlation_target, dtype=float)
        lo, hi = self.true_distance_range
        if not 0 < lo < hi:
            raise ConfigError(f"true_distance_range must satisfy 0 < min < max, got {(lo, hi)}")
        if self.noise_sigma < 0:
            raise ConfigError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if self.nlos_bias[0] < 0 or self.nlos_bias[1] < 0:
            raise ConfigError(f"nlos_bias mean and sigma must be >= 0, got {self.nlos_bias}")
        if self.class_separation < 0:
            raise ConfigError(f"class_separation must be >= 0, got {self.class_separation}")
        if means.shape != (2, d) or sigmas.shape != (2, d):
            raise ConfigError(f"feature_means/feature_sigmas must have shape (2, {d})")
        if np.any(sigmas <= 0):
            raise ConfigError("all feature sigmas must be positive")
        if corr.shape != (d, d):
            raise ConfigError(f"correlation_target must have shape ({d}, {d})")
        if np.max(np.abs(corr - corr.T)) > 1e-9:
            raise ConfigError("correlation_target must be symmetric")
        if np.max(np.abs(np.diag(corr) - 1.0)) > 1e-9:
            raise ConfigError("correlation_target must have a unit diagonal")
        try:
            np.linalg.cholesky(corr)
        except np.linalg.LinAlgError:
            raise ConfigError("correlation_target must be positive definite") from None
        if "RANGE" not in names:
            raise ConfigError("feature schema must include a RANGE column")
        for arr in (means, sigmas, corr):
            arr.setflags(write=False)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "true_distance_range", (float(lo), float(hi)))
        object.__setattr__(self, "nlos_bias", (float(self.nlos_bias[0]), float(self.nlos_bias[1])))
        object.__setattr__(self, "feature_means", means)
        object.__setattr__(self, "feature_sigmas", sigmas)
        object.__setattr__(self, "correlation_target", corr)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def effective_means(self) -> np.ndarray:
        """Class means after applying the separation scale to the NLoS offset."""
        los = self.feature_means[ClassLabel.LOS]
        offset = self.feature_means[ClassLabel.NLOS] - los
        return np.stack([los, los + self.class_separation * offset])

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "feature_names": list(self.feature_names),
            "true_distance_range": list(self.true_distance_range),
            "noise_sigma": float(self.noise_sigma),
            "nlos_bias": list(self.nlos_bias),
            "feature_means": self.feature_means.tolist(),
            "feature_sigmas": self.feature_sigmas.tolist(),
            "correlation_target": self.correlation_target.tolist(),
            "class_separation": float(self.class_separation),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        return cls(
            name=d["name"],
            true_distance_range=tuple(d["true_distance_range"]),
            noise_sigma=float(d["noise_sigma"]),
            nlos_bias=tuple(d["nlos_bias"]),
            feature_means=np.array(d["feature_means"], dtype=float),
            feature_sigmas=np.array(d["feature_sigmas"], dtype=float),
            correlation_target=np.array(d["correlation_target"], dtype=float),
            class_separation=float(d["class_separation"]),
            feature_names=tuple(d["feature_names"]),
        )


def _truncated_normal(rng: np.random.Generator, mean: float, sigma: float, size: int) -> np.ndarray:
    """Normal(mean, sigma) conditioned on >= 0, by rejection (mean >= 0 so it halts fast)."""
    if sigma == 0:
        return np.full(size, mean)
    out = rng.normal(mean, sigma, size)
    bad = out < 0
    while bad.any():
        out[bad] = rng.normal(mean, sigma, int(bad.sum()))
        bad = out < 0
    return out


def simulate_range(
    true_distance: float, condition: ClassLabel, cfg: ScenarioConfig, rng: np.random.Generator
) -> float:
    """One ranging measurement: truth plus noise, plus blockage bias under NLoS."""
    if true_distance <= 0:
        raise ValueError(f"true_distance must be positive, got {true_distance}")
    measured = true_distance + rng.normal(0.0, cfg.noise_sigma)
    if condition == ClassLabel.NLOS:
        measured += float(_truncated_normal(rng, cfg.nlos_bias[0], cfg.nlos_bias[1], 1)[0])
    return float(measured)


def generate_samples(cfg: ScenarioConfig, n_los: int, n_nlos: int, seed: int) -> Dataset:
    """Draw a labeled dataset: LoS rows first, then NLoS rows.

    Non-range features come from per-class correlated Gaussians (the target
    correlation is imposed through a Cholesky factor); the RANGE column is
    generated by the ranging model with per-sample true distances drawn
    uniformly from the configured geometry range.
    """
    if n_los < 0 or n_nlos < 0:
        raise ValueError("sample counts must be non-negative")
    rng = np.random.default_rng(seed)
    chol = np.linalg.cholesky(cfg.correlation_target)
    means = cfg.effective_means()
    range_col = cfg.feature_names.index("RANGE")
    lo, hi = cfg.true_distance_range

    blocks = []
    labels = []
    for label, count in ((ClassLabel.LOS, n_los), (ClassLabel.NLOS, n_nlos)):
        z = rng.standard_normal((count, cfg.n_features))
        x = means[label] + cfg.feature_sigmas[label] * (z @ chol.T)
        true_d = rng.uniform(lo, hi, count)
        measured = true_d + rng.normal(0.0, cfg.noise_sigma, count)
        if label == ClassLabel.NLOS:
            measured = measured + _truncated_normal(rng, cfg.nlos_bias[0], cfg.nlos_bias[1], count)
        x[:, range_col] = measured
        blocks.append(x)
        labels.append(np.full(count, int(label), dtype=np.int64))

    return Dataset(cfg.feature_names, np.vstack(blocks), np.concatenate(labels))


# ---------------------------------------------------------------------------
# Built-in scenarios
# ---------------------------------------------------------------------------

def _default_correlation() -> np.ndarray:
    """Correlation structure echoing real captures: amplitude/power block,
    power-vs-range trends, paired noise statistics."""
    names = DEFAULT_SCHEMA
    idx = {n: i for i, n in enumerate(names)}
    corr = np.eye(len(names))

    def put(a: str, b: str, value: float) -> None:
        corr[idx[a], idx[b]] = value
        corr[idx[b], idx[a]] = value

    put("F1_AMP", "F2_AMP", 0.78)
    put("F1_AMP", "F3_AMP", 0.70)
    put("F2_AMP", "F3_AMP", 0.74)
    put("FPPL", "F1_AMP", 0.66)
    put("FPPL", "F2_AMP", 0.62)
    put("FPPL", "F3_AMP", 0.58)
    put("RSS", "RX_POWER", 0.60)
    put("RSS", "FPPL", 0.42)
    put("RX_POWER", "FPPL", 0.50)
    put("RANGE", "RSS", -0.35)
    put("RANGE", "RX_POWER", -0.30)
    put("RANGE", "FPPL", -0.22)
    put("POWER_RATIO", "FP_INDEX", 0.38)
    put("POWER_RATIO", "FPPL", -0.30)
    put("POWER_RATIO", "RX_POWER", 0.18)
    put("NOISE_STD", "MAX_NOISE", 0.55)
    put("PREAMBLE_COUNT", "NOISE_STD", 0.15)
    return corr


# Class-conditional feature statistics shared by the built-in scenarios.
# Rows: LoS, NLoS. Column order matches DEFAULT_SCHEMA. The RANGE entries are
# placeholders; that column is always regenerated by the ranging model.
_BASE_MEANS = np.array(
    [
        # RANGE   RSS    FP_I    F1     F2     F3     FPPL   RX_P   P_R   N_STD  MAX_N  PRE
        [3.0, -79.0, 745.0, 15500.0, 17500.0, 18500.0, -80.0, -77.5, 2.5, 55.0, 650.0, 1024.0],
        [3.8, -81.4, 747.4, 12300.0, 14700.0, 16300.0, -82.9, -78.9, 3.9, 62.0, 740.0, 1006.0],
    ]
)
_BASE_SIGMAS = np.array(
    [
        [1.5, 2.2, 2.0, 2600.0, 2800.0, 3000.0, 2.6, 2.0, 1.1, 9.0, 110.0, 30.0],
        [2.0, 3.1, 2.8, 3650.0, 3900.0, 4200.0, 3.6, 2.8, 1.55, 12.5, 155.0, 42.0],
    ]
)


def builtin_scenario(name: str) -> ScenarioConfig:
    """Named built-in environments: a small ``studio`` and a larger ``room``."""
    if name == "studio":
        return ScenarioConfig(
            name="studio",
            true_distance_range=(0.5, 5.8),
            noise_sigma=0.05,
            nlos_bias=(0.7, 0.35),
            feature_means=_BASE_MEANS,
            feature_sigmas=_BASE_SIGMAS,
            correlation_target=_default_correlation(),
            class_separation=1.0,
        )
    if name == "room":
        means = np.array(_BASE_MEANS)
        # larger room: weaker received power, slightly noisier floor
        for col, delta in (("RSS", -1.6), ("RX_POWER", -1.4), ("FPPL", -1.2),
                           ("NOISE_STD", 3.0), ("MAX_NOISE", 35.0)):
            means[:, DEFAULT_SCHEMA.index(col)] += delta
        return ScenarioConfig(
            name="room",
            true_distance_range=(0.5, 7.2),
            noise_sigma=0.08,
            nlos_bias=(1.0, 0.5),
            feature_means=means,
            feature_sigmas=_BASE_SIGMAS * 1.15,
            correlation_target=_default_correlation(),
            class_separation=1.0,
        )
    raise ConfigError(f"unknown scenario {name!r}, expected 'studio' or 'room'")


def load_scenario(path: str | Path) -> ScenarioConfig:
    """Parse a ``key = value`` scenario file.

    Recognized keys: ``base`` (built-in template, default ``studio``),
    ``name``, ``true_distance_min``, ``true_distance_max``, ``noise_sigma``,
    ``nlos_bias_mean``, ``nlos_bias_sigma``, ``class_separation``. Lines
    starting with ``#`` are comments.
    """
    entries: dict[str, str] = {}
    for line_num, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}: line {line_num}: expected 'key = value'")
        key, _, value = line.partition("=")
        entries[key.strip()] = value.strip()

    cfg = builtin_scenario(entries.pop("base", "studio"))
    updates: dict = {}
    if "name" in entries:
        updates["name"] = entries.pop("name")

    def pop_float(key: str) -> float | None:
        if key not in entries:
            return None
        try:
            return float(entries.pop(key))
        except ValueError:
            raise ConfigError(f"{path}: value for {key!r} is not a number") from None

    lo = pop_float("true_distance_min")
    hi = pop_float("true_distance_max")
    if lo is not None or hi is not None:
        cur_lo, cur_hi = cfg.true_distance_range
        updates["true_distance_range"] = (lo if lo is not None else cur_lo,
                                          hi if hi is not None else cur_hi)
    bias_mean = pop_float("nlos_bias_mean")
    bias_sigma = pop_float("nlos_bias_sigma")
    if bias_mean is not None or bias_sigma is not None:
        cur_mean, cur_sigma = cfg.nlos_bias
        updates["nlos_bias"] = (bias_mean if bias_mean is not None else cur_mean,
                                bias_sigma if bias_sigma is not None else cur_sigma)
    for key in ("noise_sigma", "class_separation"):
        value = pop_float(key)
        if value is not None:
            updates[key] = value
    if entries:
        raise ConfigError(f"{path}: unknown key(s) {sorted(entries)}")
    return replace(cfg, **updates)
