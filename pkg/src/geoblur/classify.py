"""Clear/blurry decisions: fixed threshold rules and a linear SVM.

Ties always classify as blurry: a missed blurry frame costs a survey
re-flight, a false flag only costs a human glance.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateFeatureWarning,
    EmptyTrainingSet,
    NonFiniteLoss,
    ParamMismatch,
    SingleClassTraining,
)

MODEL_FORMAT_VERSION = "geoblur-model/1"

LABEL_CLEAR = "clear"
LABEL_BLURRY = "blurry"

DEFAULT_LAMBDA = 1e-3
DEFAULT_EPOCHS = 200
DEFAULT_SEED = 42

FEATURE_ORDER = ("alpha", "beta", "gamma")


@dataclass(frozen=True)
class ExtractionParams:
    """Feature knobs a row was computed with; scores are meaningless across
    mismatched knobs, so models refuse rows with different params."""

    grad_operator: str = "sobel3"
    grad_threshold: float = 1000.0
    svd_k: int = 50
    svd_downscale: int | None = 1024
    fft_divisor: float = 1000.0

    def to_dict(self) -> dict:
        return {
            "grad_operator": self.grad_operator,
            "grad_threshold": self.grad_threshold,
            "svd_k": self.svd_k,
            "svd_downscale": self.svd_downscale,
            "fft_divisor": self.fft_divisor,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExtractionParams":
        return cls(
            grad_operator=str(d["grad_operator"]),
            grad_threshold=float(d["grad_threshold"]),
            svd_k=int(d["svd_k"]),
            svd_downscale=None if d["svd_downscale"] is None else int(d["svd_downscale"]),
            fft_divisor=float(d["fft_divisor"]),
        )


@dataclass(frozen=True)
class FeatureVector:
    image_id: str
    alpha: float
    beta: float
    gamma: float
    params: ExtractionParams

    def __post_init__(self):
        for name in FEATURE_ORDER:
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name}={v} outside [0, 1] for {self.image_id}")

    @property
    def features(self) -> np.ndarray:
        return np.array([self.alpha, self.beta, self.gamma])


@dataclass(frozen=True)
class LinearModel:
    """Linear SVM on standardized (alpha, beta, gamma); +1 = clear, -1 = blurry."""

    weights: tuple[float, float, float]
    bias: float
    feature_means: tuple[float, float, float]
    feature_stds: tuple[float, float, float]
    lam: float
    epochs: int
    seed: int
    params: ExtractionParams
    epoch_losses: tuple[float, ...] | None = field(default=None, repr=False, compare=False)

    def to_json(self) -> str:
        doc = {
            "version": MODEL_FORMAT_VERSION,
            "weights": list(self.weights),
            "bias": self.bias,
            "means": list(self.feature_means),
            "stds": list(self.feature_stds),
            "hyperparams": {"lambda": self.lam, "epochs": self.epochs, "seed": self.seed},
            "params": self.params.to_dict(),
        }
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "LinearModel":
        doc = json.loads(text)
        if doc.get("version") != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model version {doc.get('version')!r}")
        return cls(
            weights=tuple(float(x) for x in doc["weights"]),
            bias=float(doc["bias"]),
            feature_means=tuple(float(x) for x in doc["means"]),
            feature_stds=tuple(float(x) for x in doc["stds"]),
            lam=float(doc["hyperparams"]["lambda"]),
            epochs=int(doc["hyperparams"]["epochs"]),
            seed=int(doc["hyperparams"]["seed"]),
            params=ExtractionParams.from_dict(doc["params"]),
        )


@dataclass(frozen=True)
class ThresholdRule:
    feature: str  # alpha | beta | gamma
    direction: str  # greater_is_blurry | greater_is_clear
    cutoff: float

    def __post_init__(self):
        if self.feature not in FEATURE_ORDER:
            raise ValueError(f"unknown feature {self.feature!r}")
        if self.direction not in ("greater_is_blurry", "greater_is_clear"):
            raise ValueError(f"unknown direction {self.direction!r}")
        if not np.isfinite(self.cutoff):
            raise ValueError("cutoff must be finite")


def parse_rule(text: str) -> ThresholdRule:
    """Parse rules like ``beta>0.63:blurry`` or ``gamma<0.01:blurry``."""
    try:
        cond, label = text.split(":")
        op = ">" if ">" in cond else "<"
        feature, cutoff = cond.split(op)
        label = label.strip().lower()
        feature = feature.strip().lower()
        value = float(cutoff)
    except ValueError as exc:
        raise ValueError(f"cannot parse rule {text!r}; expected feat>cut:label") from exc
    if label not in (LABEL_CLEAR, LABEL_BLURRY):
        raise ValueError(f"rule label must be clear or blurry, got {label!r}")
    blurry_side_high = (op == ">") == (label == LABEL_BLURRY)
    direction = "greater_is_blurry" if blurry_side_high else "greater_is_clear"
    return ThresholdRule(feature=feature, direction=direction, cutoff=value)


def threshold_classify(rule: ThresholdRule, row: FeatureVector) -> str:
    """Strict comparison per the rule direction; exact ties label blurry."""
    value = getattr(row, rule.feature)
    if rule.direction == "greater_is_blurry":
        return LABEL_BLURRY if value >= rule.cutoff else LABEL_CLEAR
    return LABEL_CLEAR if value > rule.cutoff else LABEL_BLURRY


def fit_scaler(rows: list[FeatureVector]) -> tuple[np.ndarray, np.ndarray]:
    """Per-feature mean and population std over the rows.

    Zero-variance features get std forced to 1 (with a warning) so
    standardization stays defined.
    """
    if len(rows) < 2:
        raise EmptyTrainingSet(f"need at least 2 rows to fit a scaler, got {len(rows)}")
    x = np.stack([r.features for r in rows])
    means = x.mean(axis=0)
    stds = x.std(axis=0)
    for i, name in enumerate(FEATURE_ORDER):
        if stds[i] == 0.0:
            warnings.warn(
                f"feature {name} has zero variance; std forced to 1",
                DegenerateFeatureWarning,
                stacklevel=2,
            )
            stds[i] = 1.0
    return means, stds


def _hinge_loss(w: np.ndarray, b: float, x: np.ndarray, y: np.ndarray, lam: float) -> float:
    margins = y * (x @ w + b)
    return lam * float(w @ w) / 2.0 + float(np.mean(np.maximum(0.0, 1.0 - margins)))


def train_linear_svm(
    rows: list[FeatureVector],
    labels: list[int],
    lam: float = DEFAULT_LAMBDA,
    epochs: int = DEFAULT_EPOCHS,
    seed: int = DEFAULT_SEED,
) -> LinearModel:
    """Pegasos-style subgradient descent on the regularized hinge loss.

    Steps are 1/(lam*t); sample order is reshuffled each epoch from the seed
    alone, so the result is bit-reproducible. The returned weights are the
    running average of the iterates, whose training loss is recorded per
    epoch in ``epoch_losses``.
    """
    if len(rows) != len(labels):
        raise ValueError("rows and labels differ in length")
    if lam <= 0 or epochs < 1:
        raise ValueError("need lam > 0 and epochs >= 1")
    y = np.asarray(labels, dtype=np.float64)
    if set(np.unique(y)) - {1.0, -1.0}:
        raise ValueError("labels must be +1 (clear) or -1 (blurry)")
    if not (np.any(y == 1.0) and np.any(y == -1.0)):
        raise SingleClassTraining("training data must contain both +1 and -1 labels")
    params = rows[0].params
    for r in rows:
        if r.params != params:
            raise ParamMismatch(
                f"row {r.image_id} extracted with different params than row 0"
            )
    means, stds = fit_scaler(rows)
    x = (np.stack([r.features for r in rows]) - means) / stds
    n = len(rows)

    rng = np.random.RandomState(seed)
    w = np.zeros(3)
    b = 0.0
    w_sum = np.zeros(3)
    b_sum = 0.0
    t = 0
    losses = []
    for _ in range(epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (lam * t)
            if y[i] * (x[i] @ w + b) < 1.0:
                w = (1.0 - eta * lam) * w + eta * y[i] * x[i]
                b = b + eta * y[i]
            else:
                w = (1.0 - eta * lam) * w
            w_sum += w
            b_sum += b
        losses.append(_hinge_loss(w_sum / t, b_sum / t, x, y, lam))
    w_avg = w_sum / t
    b_avg = b_sum / t
    if not (np.all(np.isfinite(w_avg)) and np.isfinite(b_avg) and np.isfinite(losses[-1])):
        raise NonFiniteLoss("training diverged to non-finite weights or loss")
    return LinearModel(
        weights=tuple(float(v) for v in w_avg),
        bias=float(b_avg),
        feature_means=tuple(float(v) for v in means),
        feature_stds=tuple(float(v) for v in stds),
        lam=float(lam),
        epochs=int(epochs),
        seed=int(seed),
        params=params,
        epoch_losses=tuple(losses),
    )


def predict(model: LinearModel, row: FeatureVector) -> tuple[str, float]:
    """Label and margin score; score 0 falls on the blurry side."""
    if row.params != model.params:
        raise ParamMismatch(
            f"row {row.image_id} params {row.params} != model params {model.params}"
        )
    x = (row.features - np.asarray(model.feature_means)) / np.asarray(model.feature_stds)
    score = float(x @ np.asarray(model.weights) + model.bias)
    return (LABEL_CLEAR if score > 0.0 else LABEL_BLURRY), score
