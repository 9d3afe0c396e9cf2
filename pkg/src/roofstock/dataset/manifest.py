"""The labeled tile inventory.

Persisted as JSON-lines, one row per line, UTF-8, sorted by tile_id, with
a fixed key order so serialization is canonical and diffs are stable.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from roofstock.errors import ValidationError

SPLITS = ("train", "test", "unassigned")
SOURCES = ("aircraft", "drone")

ROW_KEYS = (
    "tile_id",
    "tile_path",
    "country",
    "source",
    "roof_type",
    "roof_material",
    "split",
    "annotator",
    "timestamp",
)


@dataclass(frozen=True)
class ManifestRow:
    tile_id: str
    tile_path: str
    country: str
    source: str
    roof_type: str | None = None
    roof_material: str | None = None
    split: str = "unassigned"
    annotator: str | None = None
    timestamp: str | None = None

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValidationError(f"row {self.tile_id!r}: source must be one of {SOURCES}, got {self.source!r}")
        if self.split not in SPLITS:
            raise ValidationError(f"row {self.tile_id!r}: split must be one of {SPLITS}, got {self.split!r}")

    def label(self, task: str) -> str | None:
        return getattr(self, task)

    def to_json(self) -> str:
        return json.dumps({k: getattr(self, k) for k in ROW_KEYS}, ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> "ManifestRow":
        data = json.loads(line)
        unknown = set(data) - set(ROW_KEYS)
        if unknown:
            raise ValidationError(f"manifest row has unknown keys {sorted(unknown)}")
        return cls(**data)


@dataclass
class DatasetManifest:
    rows: list[ManifestRow] = field(default_factory=list)
    seed: int | None = None

    def __post_init__(self):
        self._check_unique()

    def _check_unique(self):
        seen = set()
        for row in self.rows:
            if row.tile_id in seen:
                raise ValidationError(f"duplicate tile_id {row.tile_id!r} in manifest")
            seen.add(row.tile_id)

    def __len__(self) -> int:
        return len(self.rows)

    def by_id(self, tile_id: str) -> ManifestRow:
        for row in self.rows:
            if row.tile_id == tile_id:
                return row
        raise KeyError(tile_id)

    def rows_for_split(self, split: str) -> list[ManifestRow]:
        return [r for r in self.rows if r.split == split]

    def labeled_rows(self, task: str) -> list[ManifestRow]:
        return [r for r in self.rows if r.label(task) is not None]

    def class_counts(self, task: str, split: str | None = None) -> dict[str, int]:
        counts: dict[str, int] = {}
        for row in self.rows:
            if split is not None and row.split != split:
                continue
            label = row.label(task)
            if label is not None:
                counts[label] = counts.get(label, 0) + 1
        return counts

    def with_row_updated(self, tile_id: str, **changes) -> "DatasetManifest":
        rows = [replace(r, **changes) if r.tile_id == tile_id else r for r in self.rows]
        return DatasetManifest(rows=rows, seed=self.seed)

    def sorted_rows(self) -> list[ManifestRow]:
        return sorted(self.rows, key=lambda r: r.tile_id)


def combine_manifests(a: DatasetManifest, b: DatasetManifest) -> DatasetManifest:
    """Union of two manifests; tile_ids must be disjoint.

    Country fields and split assignments carry through unchanged, so the
    combined train split is the union of the inputs' train splits.
    """
    collisions = {r.tile_id for r in a.rows} & {r.tile_id for r in b.rows}
    if collisions:
        raise ValidationError(f"tile_id collision while combining manifests: {sorted(collisions)[:5]}")
    return DatasetManifest(rows=list(a.rows) + list(b.rows), seed=a.seed if a.seed is not None else b.seed)


def write_manifest(manifest: DatasetManifest, path: str | Path) -> Path:
    """Atomic canonical write: sorted by tile_id, one JSON object per line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        for row in manifest.sorted_rows():
            fh.write(row.to_json() + "\n")
    os.replace(tmp, path)
    return path


def read_manifest(path: str | Path, seed: int | None = None) -> DatasetManifest:
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            rows.append(ManifestRow.from_json(line))
    return DatasetManifest(rows=rows, seed=seed)


def manifest_to_csv(manifest: DatasetManifest, path: str | Path) -> Path:
    """Spreadsheet export with the same columns as the JSONL rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=ROW_KEYS)
        writer.writeheader()
        for row in manifest.sorted_rows():
            writer.writerow({k: getattr(row, k) if getattr(row, k) is not None else "" for k in ROW_KEYS})
    return path
