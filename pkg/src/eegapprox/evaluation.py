"""Accuracy of approximate features: confusion counts, accuracy, a
nearest-centroid reference classifier and feature deviation."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from eegapprox.approximation import ApproxConfig, level_to_config
from eegapprox.errors import DomainError, ParseError, StructureError
from eegapprox.signal_io import EegRecord
from eegapprox.spectral import BandProfile, FeatureVector, extract_epoch_features

EPS = 1e-12


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise DomainError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def confusion(predicted: Sequence[int], truth: Sequence[int]) -> ConfusionCounts:
    p = np.asarray(predicted, dtype=int)
    t = np.asarray(truth, dtype=int)
    if p.shape != t.shape or p.ndim != 1:
        raise DomainError(f"predicted and truth lengths differ ({p.size} vs {t.size})")
    if p.size == 0:
        raise DomainError("cannot count an empty prediction set")
    if not (np.isin(p, (0, 1)).all() and np.isin(t, (0, 1)).all()):
        raise DomainError("confusion counting needs binary {0, 1} labels")
    return ConfusionCounts(
        tp=int(np.sum((p == 1) & (t == 1))),
        tn=int(np.sum((p == 0) & (t == 0))),
        fp=int(np.sum((p == 1) & (t == 0))),
        fn=int(np.sum((p == 0) & (t == 1))),
    )


def accuracy(c: ConfusionCounts) -> float:
    """(TP + TN) / (TP + TN + FP + FN)."""
    if c.total == 0:
        raise DomainError("accuracy of zero evaluated epochs is undefined")
    return (c.tp + c.tn) / c.total


def one_vs_rest(labels: Sequence[int], positive: int) -> np.ndarray:
    return (np.asarray(labels) == positive).astype(int)


# ---------------------------------------------------------------- classifiers


class Classifier(Protocol):
    def predict(self, features: Sequence[FeatureVector]) -> list[int]: ...


def _as_matrix(features) -> np.ndarray:
    rows = [f.flat if isinstance(f, FeatureVector) else np.ravel(f) for f in features]
    return np.array(rows, dtype=float)


@dataclass(frozen=True, eq=False)
class NearestCentroid:
    labels: tuple[int, ...]
    centroids: np.ndarray  # (n_classes, n_dims)
    scale: np.ndarray  # (n_dims,)
    kind: str = "nearest_centroid"

    def __post_init__(self):
        if len(self.labels) < 2:
            raise DomainError("a classifier needs at least two classes")
        if self.centroids.shape != (len(self.labels), self.scale.size):
            raise DomainError("centroid dimensionality does not match the scale vector")

    @property
    def n_dims(self) -> int:
        return self.scale.size

    def classify(self, f) -> int:
        return self.predict([f])[0]

    def predict(self, features) -> list[int]:
        x = _as_matrix(features)
        if x.ndim != 2 or x.shape[1] != self.n_dims:
            raise DomainError(f"feature dimension {x.shape[-1]} does not match classifier ({self.n_dims})")
        d = ((x[:, None, :] - self.centroids[None, :, :]) / self.scale) ** 2
        # labels are sorted, so argmin's first-hit rule breaks ties toward the smallest label
        return [self.labels[i] for i in np.argmin(d.sum(axis=2), axis=1)]


def train_nearest_centroid(features, labels: Sequence[int], classes: Sequence[int] | None = None) -> NearestCentroid:
    """Per-class mean vectors and a per-dimension global standard deviation.

    ``classes`` names the classes that must be present; by default, those
    seen in ``labels``.
    """
    x = _as_matrix(features)
    y = np.asarray(labels, dtype=int)
    if x.shape[0] != y.size:
        raise DomainError(f"{x.shape[0]} feature vectors for {y.size} labels")
    wanted = sorted(set(y.tolist()) if classes is None else set(classes))
    if len(wanted) < 2:
        raise DomainError("training needs at least two classes")
    centroids = []
    for lab in wanted:
        members = x[y == lab]
        if members.shape[0] == 0:
            raise DomainError(f"class {lab} has no training samples")
        centroids.append(members.mean(axis=0))
    scale = x.std(axis=0)
    scale[scale == 0] = 1.0
    return NearestCentroid(tuple(wanted), np.array(centroids), scale)


def classify(clf: NearestCentroid, f) -> int:
    return clf.classify(f)


@dataclass(frozen=True)
class ExternalPredictions:
    """Pre-computed labels, one per epoch, from a model run elsewhere."""

    labels: tuple[int, ...]
    kind: str = "external"

    def predict(self, features) -> list[int]:
        if len(features) != len(self.labels):
            raise StructureError(f"{len(self.labels)} external predictions for {len(features)} epochs")
        return list(self.labels)


def load_predictions(path) -> ExternalPredictions:
    out = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            out.append(int(line))
        except ValueError:
            raise ParseError(f"{path}: line {lineno}: not an integer label: {line!r}") from None
    return ExternalPredictions(tuple(out))


# ---------------------------------------------------------------- accuracy under approximation


def approximation_accuracy(
    rec: EegRecord,
    profile: BandProfile,
    clf: Classifier,
    approx: ApproxConfig,
    baseline: ApproxConfig | None = None,
    use_labels: bool = False,
    positive_label: int = 1,
) -> float:
    """Accuracy of per-epoch predictions under ``approx``.

    Truth is the prediction under ``baseline`` (level 0 by default), or the
    record's own labels with ``use_labels``. Multi-class predictions are
    scored one-vs-rest against ``positive_label``.
    """
    pred = clf.predict(extract_epoch_features(rec, profile, approx))
    if use_labels:
        if rec.labels is None:
            raise StructureError("record carries no labels")
        truth = rec.labels
    else:
        base = level_to_config(0) if baseline is None else baseline
        truth = pred if base == approx else clf.predict(extract_epoch_features(rec, profile, base))
    return accuracy(confusion(one_vs_rest(pred, positive_label), one_vs_rest(truth, positive_label)))


def feature_deviation(a, b) -> float:
    """Mean relative deviation ``|a - b| / max(|b|, eps)`` over dimensions."""
    x = a.flat if isinstance(a, FeatureVector) else np.ravel(np.asarray(a, dtype=float))
    y = b.flat if isinstance(b, FeatureVector) else np.ravel(np.asarray(b, dtype=float))
    if x.shape != y.shape:
        raise DomainError(f"feature dimensions differ ({x.size} vs {y.size})")
    return float(np.mean(np.abs(x - y) / np.maximum(np.abs(y), EPS)))
