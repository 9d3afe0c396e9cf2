"""Source-aware stratified train/test splitting.

Test rows are drawn per class, uniformly at random with a fixed seed, and
only from drone-source rows: the higher-resolution imagery is what the
models are ultimately evaluated on, so aircraft-derived rows always stay
in training.
"""

from __future__ import annotations

import math
import random
from dataclasses import replace

from roofstock.errors import ValidationError
from roofstock.dataset.manifest import DatasetManifest
from roofstock.dataset.schema import task_classes

DEFAULT_TEST_FRAC = 0.2
DEFAULT_SEED = 42


def class_test_count(class_total: int, test_frac: float) -> int:
    """round(test_frac * total) with exact halves broken downward."""
    return math.ceil(class_total * test_frac - 0.5)


def stratified_split(
    manifest: DatasetManifest,
    task: str,
    test_frac: float = DEFAULT_TEST_FRAC,
    seed: int = DEFAULT_SEED,
) -> DatasetManifest:
    """Assign every labeled row to train or test, stratified by class.

    Deterministic for a fixed seed. Raises if any row is unlabeled for the
    task or if a class lacks enough drone rows to fill its test quota.
    """
    if not (0 < test_frac < 1):
        raise ValidationError(f"test_frac must be in (0, 1), got {test_frac}")
    classes = task_classes(task)

    unlabeled = [r.tile_id for r in manifest.rows if r.label(task) is None]
    if unlabeled:
        raise ValidationError(
            f"{len(unlabeled)} rows are unlabeled for task {task!r} (first: {unlabeled[0]!r}); "
            "label them or drop them before splitting"
        )

    rng = random.Random(seed)
    test_ids: set[str] = set()
    for cls in classes:
        class_rows = sorted((r for r in manifest.rows if r.label(task) == cls), key=lambda r: r.tile_id)
        if not class_rows:
            continue
        quota = class_test_count(len(class_rows), test_frac)
        drone_rows = [r for r in class_rows if r.source == "drone"]
        if len(drone_rows) < quota:
            raise ValidationError(
                f"class {cls!r}: need {quota} drone rows for the test split "
                f"but only {len(drone_rows)} of {len(class_rows)} rows are drone-source"
            )
        test_ids.update(r.tile_id for r in rng.sample(drone_rows, quota))

    rows = [replace(r, split="test" if r.tile_id in test_ids else "train") for r in manifest.rows]
    return DatasetManifest(rows=rows, seed=seed)
