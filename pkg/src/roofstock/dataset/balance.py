"""Random oversampling of minority classes."""

from __future__ import annotations

import random

from roofstock.errors import ValidationError
from roofstock.dataset.manifest import ManifestRow
from roofstock.dataset.schema import task_classes


def oversample(rows: list[ManifestRow], task: str, seed: int = 42) -> list[ManifestRow]:
    """Duplicate minority-class rows until every present class matches the majority.

    Draws are uniform with replacement, seeded; original rows are all
    retained (the result is a training sequence, not a manifest --
    duplicated tile_ids are intentional). Classes absent from the data are
    skipped, never synthesized.
    """
    classes = task_classes(task)
    by_class: dict[str, list[ManifestRow]] = {}
    for row in rows:
        label = row.label(task)
        if label is None:
            raise ValidationError(f"row {row.tile_id!r} is unlabeled for task {task!r}")
        by_class.setdefault(label, []).append(row)
    if not by_class:
        raise ValidationError("cannot oversample an empty row list")

    majority = max(len(v) for v in by_class.values())
    rng = random.Random(seed)
    out = list(rows)
    for cls in classes:
        members = by_class.get(cls)
        if not members:
            continue
        deficit = majority - len(members)
        out.extend(rng.choice(members) for _ in range(deficit))
    return out
