"""Cross-region generalization matrix: every trained model against every test set."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from roofstock.errors import ValidationError
from roofstock.dataset.manifest import ManifestRow
from roofstock.dataset.schema import task_classes
from roofstock.classifier.predict import predict
from roofstock.classifier.train import ModelArtifact, _load_image
from roofstock.evaluation.metrics import MetricBundle, confusion_matrix, macro_metrics


@dataclass(frozen=True)
class CrossCountryCell:
    train_source: str
    test_source: str
    task: str
    metrics: MetricBundle
    missing_classes: tuple[str, ...] = ()  # truth classes the model cannot predict
    sample_count: int = 0


def evaluate_rows(
    artifact: ModelArtifact,
    rows: list[ManifestRow],
    task: str,
    tiles_root: str | Path | None = None,
) -> tuple[MetricBundle, tuple[str, ...], int]:
    """Score one artifact on labeled rows.

    Truth classes absent from the artifact's class list can never be
    predicted, so those samples count as errors; the omission is surfaced
    instead of silently dropped.
    """
    labeled = [r for r in rows if r.label(task) is not None]
    if not labeled:
        raise ValidationError(f"no labeled rows to evaluate for task {task!r}")

    tiles_root = Path(tiles_root) if tiles_root is not None else None
    cache: dict = {}
    tiles = [(r.tile_id, _load_image(r, tiles_root, artifact.input_size, cache)) for r in labeled]
    predictions = predict(artifact, tiles)

    truth = [r.label(task) for r in labeled]
    pred = [p.label for p in predictions]
    present = set(truth) | set(pred)
    classes = [c for c in task_classes(task) if c in present]
    bundle = macro_metrics(confusion_matrix(truth, pred, classes))
    missing = tuple(c for c in task_classes(task) if c in set(truth) and c not in artifact.classes)
    return bundle, missing, len(labeled)


def cross_country_matrix(
    artifacts: Mapping[str, ModelArtifact],
    test_rows: Mapping[str, list[ManifestRow]],
    task: str,
    tiles_root: str | Path | None = None,
) -> list[CrossCountryCell]:
    """One cell per (training source x test region), in input order.

    Training sources are typically the two regions plus "Combined"; test
    sets are each region's own drone-only test split.
    """
    if not artifacts or not test_rows:
        raise ValidationError("need at least one artifact and one test set")
    cells = []
    for train_source, artifact in artifacts.items():
        for test_source, rows in test_rows.items():
            bundle, missing, count = evaluate_rows(artifact, rows, task, tiles_root)
            cells.append(
                CrossCountryCell(
                    train_source=train_source,
                    test_source=test_source,
                    task=task,
                    metrics=bundle,
                    missing_classes=missing,
                    sample_count=count,
                )
            )
    return cells
