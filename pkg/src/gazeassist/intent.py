"""Two-class Gaussian naive Bayes over gaze features, and the mapping
from its posterior to the confidence level that drives the fixtures.

The classifier separates "the operator is about to act" from "the
operator is just looking". Likelihoods are evaluated in log space and the
posterior is rescaled so that anything at or below 50% carries zero
confidence; losing eye tracking for more than TRACK_LOSS_LIMIT seconds
also forces confidence to zero.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .gaze import GazeFeatures

INTENT = "intent"
NO_INTENT = "no_intent"
CLASSES = (INTENT, NO_INTENT)

FEATURE_NAMES = ("max_dist", "mean_dist", "near_count")
VARIANCE_FLOOR = 1e-6
TRACK_LOSS_LIMIT = 0.75
MODEL_VERSION = 1


class TrainingDataError(ValueError):
    """Raised when the training corpus cannot support a two-class fit."""


@dataclass(frozen=True)
class LabeledWindow:
    features: GazeFeatures
    label: str


@dataclass(frozen=True)
class ClassStats:
    means: tuple[float, float, float]
    variances: tuple[float, float, float]
    prior: float


@dataclass(frozen=True)
class IntentModel:
    """Per-class Gaussian parameters for the three gaze features."""

    classes: dict[str, ClassStats]
    feature_names: tuple[str, ...] = FEATURE_NAMES
    variance_floor: float = VARIANCE_FLOOR
    version: int = MODEL_VERSION

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "feature_names": list(self.feature_names),
            "variance_floor": self.variance_floor,
            "classes": {
                name: {
                    "means": list(cs.means),
                    "variances": list(cs.variances),
                    "prior": cs.prior,
                }
                for name, cs in self.classes.items()
            },
        }

    @staticmethod
    def from_dict(doc: dict) -> "IntentModel":
        classes = {
            name: ClassStats(
                means=tuple(entry["means"]),
                variances=tuple(entry["variances"]),
                prior=float(entry["prior"]),
            )
            for name, entry in doc["classes"].items()
        }
        return IntentModel(
            classes=classes,
            feature_names=tuple(doc["feature_names"]),
            variance_floor=float(doc["variance_floor"]),
            version=int(doc["version"]),
        )


@dataclass(frozen=True)
class IntentEstimate:
    """Classifier output for one window: posterior, confidence, and the
    gaze-resolved workspace target when one could be determined."""

    p_intent: float
    ci: float
    target: Optional[np.ndarray] = field(default=None)


def fit(data: Sequence[LabeledWindow], variance_floor: float = VARIANCE_FLOOR) -> IntentModel:
    """Maximum-likelihood Gaussian fit per class and feature.

    Priors follow class frequencies; variances are floored so degenerate
    clusters (all identical windows) still yield finite densities.
    """
    by_class: dict[str, list[tuple[float, float, float]]] = {c: [] for c in CLASSES}
    for w in data:
        if w.label not in by_class:
            raise TrainingDataError(f"unknown label {w.label!r}")
        by_class[w.label].append(w.features.as_tuple())
    for name, rows in by_class.items():
        if not rows:
            raise TrainingDataError(f"class {name!r} absent from training data")
    total = len(data)
    classes: dict[str, ClassStats] = {}
    for name, rows in by_class.items():
        arr = np.asarray(rows, dtype=float)
        means = arr.mean(axis=0)
        variances = np.maximum(arr.var(axis=0), variance_floor)
        classes[name] = ClassStats(
            means=tuple(float(v) for v in means),
            variances=tuple(float(v) for v in variances),
            prior=len(rows) / total,
        )
    return IntentModel(classes=classes, variance_floor=variance_floor)


def _log_likelihood(stats: ClassStats, x: tuple[float, float, float]) -> float:
    ll = math.log(stats.prior)
    for value, mean, var in zip(x, stats.means, stats.variances):
        ll += -0.5 * math.log(2.0 * math.pi * var) - (value - mean) ** 2 / (2.0 * var)
    return ll


def posterior(model: IntentModel, features: GazeFeatures) -> float:
    """Posterior probability of the intent class, computed in log space."""
    x = features.as_tuple()
    log_i = _log_likelihood(model.classes[INTENT], x)
    log_n = _log_likelihood(model.classes[NO_INTENT], x)
    # p_i = 1 / (1 + exp(log_n - log_i)), guarded against overflow
    delta = log_n - log_i
    if delta > 700.0:
        return 0.0
    if delta < -700.0:
        return 1.0
    return 1.0 / (1.0 + math.exp(delta))


def classify(model: IntentModel, features: GazeFeatures) -> str:
    return INTENT if posterior(model, features) >= 0.5 else NO_INTENT


def confidence(p_intent: float, track_loss: float = 0.0) -> float:
    """Rescale the intent posterior into a confidence level in [0, 1].

    Posteriors at or below 0.5 carry no confidence; above that the value
    is linear up to 1. Tracking loss beyond TRACK_LOSS_LIMIT overrides
    everything to zero.
    """
    if not 0.0 <= p_intent <= 1.0:
        raise ValueError(f"p_intent must lie in [0, 1], got {p_intent}")
    if track_loss > TRACK_LOSS_LIMIT:
        return 0.0
    if p_intent < 0.5:
        return 0.0
    return (p_intent - 0.5) / 0.5


def save_model(model: IntentModel, path) -> None:
    with open(path, "w") as fh:
        json.dump(model.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path) -> IntentModel:
    with open(path) as fh:
        return IntentModel.from_dict(json.load(fh))


def accuracy(model: IntentModel, windows: Iterable[LabeledWindow]) -> float:
    windows = list(windows)
    if not windows:
        raise ValueError("no windows to score")
    hits = sum(1 for w in windows if classify(model, w.features) == w.label)
    return hits / len(windows)


def estimate(model: IntentModel, window, track_loss: float, scene=None) -> IntentEstimate:
    """Full per-tick intent readout from the current gaze window.

    Windows below the feature minimum carry no evidence and read as zero
    posterior. The target is the gaze-centroid raycast into the scene
    when one is given; an unresolvable centroid leaves it None.
    """
    from .gaze import MIN_FEATURE_SAMPLES, extract_features

    if len(window) >= MIN_FEATURE_SAMPLES:
        p_intent = posterior(model, extract_features(window))
    else:
        p_intent = 0.0
    ci = confidence(p_intent, track_loss)
    target = None
    if scene is not None and len(window) > 0:
        from .scene import OutOfBoundsError, SceneError, resolve_target

        try:
            target = resolve_target(window.centroid, scene)
        except (OutOfBoundsError, SceneError):
            target = None
    return IntentEstimate(p_intent, ci, target)
