"""Confusion matrices and macro-averaged metrics.

Metrics are unweighted means over classes present in the truth, reported
as percentages rounded to 2 decimals at construction so rendered reports
round-trip exactly. A class with zero predicted positives gets precision 0
(flagged), matching common tooling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from roofstock.errors import ValidationError


@dataclass(frozen=True)
class ConfusionMatrix:
    classes: tuple[str, ...]
    counts: np.ndarray  # K x K, rows = true, cols = predicted

    def __post_init__(self):
        k = len(self.classes)
        if self.counts.shape != (k, k):
            raise ValidationError(f"counts must be {k}x{k}, got {self.counts.shape}")
        if (self.counts < 0).any():
            raise ValidationError("confusion matrix counts must be >= 0")

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class MetricBundle:
    """Percent scores, 2 decimals: f1 / precision / recall / accuracy."""

    f1: float
    precision: float
    recall: float
    accuracy: float
    zero_precision_classes: tuple[str, ...] = field(default=())

    def as_dict(self) -> dict:
        return {"f1": self.f1, "precision": self.precision, "recall": self.recall, "accuracy": self.accuracy}


def confusion_matrix(truth: list[str], pred: list[str], classes: list[str] | tuple[str, ...]) -> ConfusionMatrix:
    """Count grid cell[i][j] = #(true=classes[i], predicted=classes[j])."""
    if len(truth) != len(pred):
        raise ValidationError(f"truth and predictions differ in length: {len(truth)} vs {len(pred)}")
    index = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for t, p in zip(truth, pred):
        if t not in index:
            raise ValidationError(f"unknown truth label {t!r}; classes are {list(classes)}")
        if p not in index:
            raise ValidationError(f"unknown predicted label {p!r}; classes are {list(classes)}")
        counts[index[t], index[p]] += 1
    return ConfusionMatrix(classes=tuple(classes), counts=counts)


def macro_metrics(cm: ConfusionMatrix) -> MetricBundle:
    """Macro precision/recall/F1 over classes present in truth, plus accuracy."""
    total = cm.total
    if total == 0:
        raise ValidationError("cannot compute metrics on an empty confusion matrix")

    counts = cm.counts.astype(np.float64)
    present = [i for i in range(len(cm.classes)) if counts[i].sum() > 0]

    precisions, recalls, f1s = [], [], []
    zero_precision = []
    for i in present:
        tp = counts[i, i]
        fp = counts[:, i].sum() - tp
        fn = counts[i, :].sum() - tp
        if tp + fp == 0:
            precision = 0.0
            zero_precision.append(cm.classes[i])
        else:
            precision = tp / (tp + fp)
        recall = tp / (tp + fn)
        f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
        precisions.append(precision)
        recalls.append(recall)
        f1s.append(f1)

    accuracy = float(np.trace(counts)) / total
    return MetricBundle(
        f1=round(100.0 * float(np.mean(f1s)), 2),
        precision=round(100.0 * float(np.mean(precisions)), 2),
        recall=round(100.0 * float(np.mean(recalls)), 2),
        accuracy=round(100.0 * accuracy, 2),
        zero_precision_classes=tuple(zero_precision),
    )
