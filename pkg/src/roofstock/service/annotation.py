"""Annotation backend: tile leases, write-ahead label log, manifest state.

Labels are appended to a JSONL write-ahead log before the in-memory
manifest is touched; the manifest file is compacted periodically and the
log is replayed over it on startup, so a crash mid-annotation never loses
accepted labels. Replay is idempotent (last write wins, in log order).
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from roofstock.errors import RoofstockError, ValidationError
from roofstock.dataset.manifest import DatasetManifest, ManifestRow, read_manifest, write_manifest
from roofstock.dataset.schema import task_classes, validate_label

LEASE_SECONDS = 30.0
COMPACT_EVERY = 20


class LeaseConflict(RoofstockError):
    """Submitted for a tile whose lease expired or belongs to someone else."""


@dataclass
class Lease:
    tile_id: str
    annotator: str
    task: str
    expires: float


def _now_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def wal_path_for(manifest_path: str | Path) -> Path:
    manifest_path = Path(manifest_path)
    return manifest_path.with_name(manifest_path.stem + ".labels.jsonl")


def apply_label_entry(manifest: DatasetManifest, entry: dict) -> DatasetManifest:
    """Apply one log entry to the manifest; unknown tiles are a hard error."""
    task = entry["task"]
    if task not in ("roof_type", "roof_material"):
        raise ValidationError(f"label log entry has unknown task {task!r}")
    manifest.by_id(entry["tile_id"])  # raises KeyError for unknown tiles
    return manifest.with_row_updated(
        entry["tile_id"],
        **{task: entry["label"]},
        annotator=entry.get("annotator"),
        timestamp=entry.get("timestamp"),
    )


def replay_label_log(manifest: DatasetManifest, wal_path: str | Path) -> DatasetManifest:
    """Reconstruct label state by replaying the whole log in order."""
    wal_path = Path(wal_path)
    if not wal_path.exists():
        return manifest
    for line in wal_path.read_text(encoding="utf-8").splitlines():
        if line.strip():
            manifest = apply_label_entry(manifest, json.loads(line))
    return manifest


class AnnotationStore:
    """Single-writer label state over one manifest.

    Reads are cheap; label writes and lease mutations serialize through one
    lock. The lease table guarantees a tile is served to at most one
    annotator at a time.
    """

    def __init__(
        self,
        manifest_path: str | Path,
        tiles_dir: str | Path,
        lease_seconds: float = LEASE_SECONDS,
        compact_every: int = COMPACT_EVERY,
        clock: Callable[[], float] = time.monotonic,
    ):
        self.manifest_path = Path(manifest_path)
        self.tiles_dir = Path(tiles_dir)
        self.wal_path = wal_path_for(self.manifest_path)
        self.lease_seconds = lease_seconds
        self.compact_every = compact_every
        self.clock = clock

        self._lock = threading.Lock()
        self._leases: dict[str, Lease] = {}
        self._cursors: dict[str, str] = {}  # annotator -> last leased tile_id
        self._pending_writes = 0
        self._seq = 0

        manifest = read_manifest(self.manifest_path)
        self.manifest = replay_label_log(manifest, self.wal_path)
        if self.wal_path.exists():
            self._seq = sum(1 for line in self.wal_path.read_text(encoding="utf-8").splitlines() if line.strip())

    # -- leases ------------------------------------------------------------

    def _purge_expired(self) -> None:
        now = self.clock()
        for tile_id in [t for t, lease in self._leases.items() if lease.expires <= now]:
            del self._leases[tile_id]

    def lease_next(self, task: str, annotator: str) -> tuple[ManifestRow | None, int]:
        """Lease the next unlabeled tile; returns (row, pending_lease_count).

        The queue scans forward from the annotator's cursor (wrapping), so
        a skipped tile goes to the back of that annotator's queue instead
        of being served right back. Row is None when nothing is leasable:
        either the queue is done or every remaining tile is leased.
        """
        task_classes(task)  # validates the task name
        if not annotator:
            raise ValidationError("annotator name must be nonempty")
        with self._lock:
            self._purge_expired()
            rows = self.manifest.sorted_rows()
            start = 0
            cursor = self._cursors.get(annotator)
            if cursor is not None:
                start = next((i for i, r in enumerate(rows) if r.tile_id > cursor), 0)
            for row in rows[start:] + rows[:start]:
                if row.label(task) is not None or row.tile_id in self._leases:
                    continue
                self._leases[row.tile_id] = Lease(
                    tile_id=row.tile_id,
                    annotator=annotator,
                    task=task,
                    expires=self.clock() + self.lease_seconds,
                )
                self._cursors[annotator] = row.tile_id
                return row, len(self._leases)
            pending = sum(1 for lease in self._leases.values() if lease.task == task)
            return None, pending

    def release(self, tile_id: str, annotator: str) -> None:
        with self._lock:
            lease = self._leases.get(tile_id)
            if lease and lease.annotator == annotator:
                del self._leases[tile_id]

    # -- labels ------------------------------------------------------------

    def submit_label(self, tile_id: str, task: str, label: str, annotator: str) -> dict:
        """Validate, append to the log, update the manifest.

        Raises ValidationError for labels outside the schema, KeyError for
        unknown tiles, LeaseConflict when the annotator's lease expired or
        the tile is leased to someone else. Relabeling an unleased tile is
        allowed: last write wins, with the previous label kept in the log
        as the audit trail.
        """
        validate_label(task, label)
        with self._lock:
            row = self.manifest.by_id(tile_id)  # KeyError -> 404 at the API layer

            lease = self._leases.get(tile_id)
            if lease is not None:
                if lease.annotator != annotator:
                    raise LeaseConflict(f"tile {tile_id!r} is leased to another annotator")
                if lease.expires <= self.clock():
                    del self._leases[tile_id]
                    raise LeaseConflict(f"lease on tile {tile_id!r} expired; fetch it again")
                del self._leases[tile_id]

            previous = row.label(task)
            self._seq += 1
            entry = {
                "seq": self._seq,
                "tile_id": tile_id,
                "task": task,
                "label": label,
                "annotator": annotator,
                "timestamp": _now_iso(),
            }
            if previous is not None:
                entry["previous"] = previous  # audit: relabel, last write wins
            self._append_wal(entry)
            self.manifest = apply_label_entry(self.manifest, entry)

            self._pending_writes += 1
            if self._pending_writes >= self.compact_every:
                self._compact_locked()
            return entry

    def _append_wal(self, entry: dict) -> None:
        self.wal_path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.wal_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry, ensure_ascii=False) + "\n")
            fh.flush()

    def _compact_locked(self) -> None:
        write_manifest(self.manifest, self.manifest_path)
        self._pending_writes = 0

    def compact(self) -> None:
        """Persist the in-memory manifest (atomic replace)."""
        with self._lock:
            self._compact_locked()

    # -- reads ---------------------------------------------------------------

    def progress(self, task: str) -> dict:
        task_classes(task)
        with self._lock:
            labeled = len(self.manifest.labeled_rows(task))
            return {
                "task": task,
                "labeled": labeled,
                "total": len(self.manifest),
                "per_class": self.manifest.class_counts(task),
            }

    def tile_path(self, tile_id: str) -> Path:
        row = self.manifest.by_id(tile_id)
        path = Path(row.tile_path)
        if not path.is_absolute():
            path = self.tiles_dir / path
        if not path.exists():
            raise FileNotFoundError(f"tile image missing for {tile_id!r}: {path}")
        return path
