"""Fine-tuning driver for the roof classifiers.

One process, deterministic for a fixed seed in single-worker mode. Per
epoch: oversampled + augmented train pass, validation pass on a stratified
carve-out of the train split, plateau LR update. The returned artifact
carries the best-monitored epoch's weights and the full history.
"""

from __future__ import annotations

import copy
import csv
import json
import random
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np
import torch

from roofstock.errors import ConfigurationError, PipelineError, ValidationError
from roofstock.dataset.augment import augment, rng_for_sample
from roofstock.dataset.balance import oversample
from roofstock.dataset.manifest import DatasetManifest, ManifestRow
from roofstock.dataset.schema import task_classes
from roofstock.classifier.backbones import BACKBONE_IDS, BackboneProvider, BackboneSpec, DefaultBackboneProvider
from roofstock.classifier.loss import SmoothedCrossEntropy
from roofstock.classifier.schedule import PlateauTracker
from roofstock.tiling import load_tile_png, pad_to_square


@dataclass(frozen=True)
class TrainConfig:
    task: str = "roof_material"
    backbone_id: str = "tiny_test"
    input_size: int | None = None  # None = backbone default (224; 299 for inceptionv3)
    batch_size: int = 32
    max_epochs: int = 60
    initial_lr: float = 1e-5
    plateau_patience: int = 7
    plateau_factor: float = 0.1
    label_smoothing: float = 0.1
    seed: int = 42
    monitor_frac: float = 0.1

    def validate(self) -> None:
        if self.task not in ("roof_type", "roof_material"):
            raise ConfigurationError(f"unknown task {self.task!r}")
        if self.backbone_id not in BACKBONE_IDS:
            raise ConfigurationError(f"unknown backbone {self.backbone_id!r}; expected one of {BACKBONE_IDS}")
        if self.batch_size < 1:
            raise ConfigurationError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.max_epochs < 0:
            raise ConfigurationError(f"max_epochs must be >= 0, got {self.max_epochs}")
        if not (0.0 <= self.label_smoothing < 1.0):
            raise ConfigurationError(f"label_smoothing must be in [0, 1), got {self.label_smoothing}")
        if not (0.0 < self.plateau_factor < 1.0):
            raise ConfigurationError(f"plateau_factor must be in (0, 1), got {self.plateau_factor}")
        if self.plateau_patience < 1:
            raise ConfigurationError(f"plateau_patience must be >= 1, got {self.plateau_patience}")


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    val_loss: float
    lr: float  # rate in effect during the epoch


@dataclass
class ModelArtifact:
    artifact_id: str
    backbone_id: str
    classes: list[str]
    input_size: int
    normalize_mean: tuple[float, ...]
    normalize_std: tuple[float, ...]
    config: dict
    history: list[EpochRecord]
    model: torch.nn.Module

    @property
    def task(self) -> str:
        return self.config.get("task", "roof_material")


def _load_image(row: ManifestRow, tiles_root: Path | None, input_size: int, cache: dict) -> np.ndarray:
    img = cache.get(row.tile_id)
    if img is None:
        path = Path(row.tile_path)
        if tiles_root is not None and not path.is_absolute():
            path = tiles_root / path
        if not path.exists():
            raise PipelineError(f"tile image not found for row {row.tile_id!r}: {path}")
        img = pad_to_square(load_tile_png(path), input_size)
        cache[row.tile_id] = img
    return img


def _to_batch(images: list[np.ndarray], spec_mean, spec_std) -> torch.Tensor:
    arr = np.stack(images).astype(np.float32) / 255.0
    if arr.shape[3] == 1:
        arr = np.repeat(arr, 3, axis=3)
    arr = (arr - np.asarray(spec_mean, dtype=np.float32)) / np.asarray(spec_std, dtype=np.float32)
    return torch.from_numpy(arr.transpose(0, 3, 1, 2))


def _stratified_carveout(rows: list[ManifestRow], task: str, frac: float, seed: int):
    """Split rows into (train, monitor) with per-class proportions kept."""
    rng = random.Random(seed ^ 0x5F3759DF)
    by_class: dict[str, list[ManifestRow]] = {}
    for row in sorted(rows, key=lambda r: r.tile_id):
        by_class.setdefault(row.label(task), []).append(row)
    monitor_ids = set()
    for members in by_class.values():
        n_val = int(len(members) * frac)
        monitor_ids.update(r.tile_id for r in rng.sample(members, n_val))
    train = [r for r in rows if r.tile_id not in monitor_ids]
    monitor = [r for r in rows if r.tile_id in monitor_ids]
    return train, monitor


def train_classifier(
    manifest: DatasetManifest,
    cfg: TrainConfig,
    provider: BackboneProvider | None = None,
    tiles_root: str | Path | None = None,
) -> ModelArtifact:
    """Train one classifier on the manifest's train split.

    The class list is the task schema restricted to classes present in the
    training rows, in schema order, and is frozen into the artifact.
    """
    cfg.validate()
    provider = provider or DefaultBackboneProvider()
    tiles_root = Path(tiles_root) if tiles_root is not None else None

    train_rows = [r for r in manifest.rows_for_split("train") if r.label(cfg.task) is not None]
    if not train_rows:
        raise ValidationError(f"manifest has no labeled train rows for task {cfg.task!r}")

    present = {r.label(cfg.task) for r in train_rows}
    classes = [c for c in task_classes(cfg.task) if c in present]
    class_index = {c: i for i, c in enumerate(classes)}

    torch.manual_seed(cfg.seed)
    spec: BackboneSpec = provider.build(cfg.backbone_id, len(classes), cfg.input_size)
    model = spec.model
    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.initial_lr)
    criterion = SmoothedCrossEntropy(cfg.label_smoothing)
    tracker = PlateauTracker(cfg.initial_lr, patience=cfg.plateau_patience, factor=cfg.plateau_factor)

    fit_rows, monitor_rows = _stratified_carveout(train_rows, cfg.task, cfg.monitor_frac, cfg.seed)
    if not fit_rows:
        fit_rows, monitor_rows = train_rows, []
    # Oversample after the carve-out so duplicated rows never leak into the monitor split.
    fit_rows = oversample(fit_rows, cfg.task, seed=cfg.seed)

    cache: dict[str, np.ndarray] = {}
    history: list[EpochRecord] = []
    best_val = float("inf")
    best_state = copy.deepcopy(model.state_dict())

    def eval_loss(rows: list[ManifestRow]) -> float:
        model.eval()
        total, count = 0.0, 0
        with torch.no_grad():
            for start in range(0, len(rows), cfg.batch_size):
                chunk = rows[start : start + cfg.batch_size]
                images = [_load_image(r, tiles_root, spec.input_size, cache) for r in chunk]
                targets = torch.tensor([class_index[r.label(cfg.task)] for r in chunk])
                loss = criterion(model(_to_batch(images, spec.normalize_mean, spec.normalize_std)), targets)
                total += float(loss) * len(chunk)
                count += len(chunk)
        return total / max(count, 1)

    for epoch in range(cfg.max_epochs):
        lr_in_effect = tracker.lr
        for group in optimizer.param_groups:
            group["lr"] = lr_in_effect

        order = np.random.default_rng([cfg.seed, epoch]).permutation(len(fit_rows))
        model.train()
        total, count = 0.0, 0
        for start in range(0, len(order), cfg.batch_size):
            indices = order[start : start + cfg.batch_size].tolist()
            images, targets = [], []
            for idx in indices:
                row = fit_rows[idx]
                img = _load_image(row, tiles_root, spec.input_size, cache)
                images.append(augment(img, rng_for_sample(cfg.seed, idx, epoch)))
                targets.append(class_index[row.label(cfg.task)])
            batch = _to_batch(images, spec.normalize_mean, spec.normalize_std)
            optimizer.zero_grad()
            loss = criterion(model(batch), torch.tensor(targets))
            if not torch.isfinite(loss):
                raise PipelineError(f"non-finite loss at epoch {epoch}; aborting training")
            loss.backward()
            optimizer.step()
            total += loss.detach().item() * len(indices)
            count += len(indices)
        train_loss = total / max(count, 1)

        val_loss = eval_loss(monitor_rows) if monitor_rows else train_loss
        history.append(EpochRecord(epoch=epoch, train_loss=train_loss, val_loss=val_loss, lr=lr_in_effect))
        if val_loss < best_val:
            best_val = val_loss
            best_state = copy.deepcopy(model.state_dict())
        tracker.step(val_loss)

    model.load_state_dict(best_state)
    model.eval()

    config_snapshot = asdict(cfg)
    config_snapshot["optimizer"] = {"name": "adam", "betas": [0.9, 0.999], "weight_decay": 0.0}
    return ModelArtifact(
        artifact_id=f"{cfg.task}-{cfg.backbone_id}-seed{cfg.seed}",
        backbone_id=cfg.backbone_id,
        classes=classes,
        input_size=spec.input_size,
        normalize_mean=spec.normalize_mean,
        normalize_std=spec.normalize_std,
        config=config_snapshot,
        history=history,
        model=model,
    )


def save_artifact(artifact: ModelArtifact, out_dir: str | Path) -> Path:
    """Persist weights + artifact.json + history.csv into a directory."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    torch.save(artifact.model.state_dict(), out_dir / "weights.pt")
    meta = {
        "artifact_id": artifact.artifact_id,
        "backbone_id": artifact.backbone_id,
        "classes": artifact.classes,
        "input_size": artifact.input_size,
        "normalize_mean": list(artifact.normalize_mean),
        "normalize_std": list(artifact.normalize_std),
        "config": artifact.config,
        "history": [asdict(h) for h in artifact.history],
    }
    (out_dir / "artifact.json").write_text(json.dumps(meta, indent=2), encoding="utf-8")
    with open(out_dir / "history.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "train_loss", "val_loss", "lr"])
        for rec in artifact.history:
            writer.writerow([rec.epoch, repr(rec.train_loss), repr(rec.val_loss), repr(rec.lr)])
    return out_dir


def load_artifact(artifact_dir: str | Path, provider: BackboneProvider | None = None) -> ModelArtifact:
    artifact_dir = Path(artifact_dir)
    meta_path = artifact_dir / "artifact.json"
    if not meta_path.exists():
        raise FileNotFoundError(f"not a model artifact directory (missing artifact.json): {artifact_dir}")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    provider = provider or DefaultBackboneProvider()
    spec = provider.build(meta["backbone_id"], len(meta["classes"]), meta["input_size"])
    state = torch.load(artifact_dir / "weights.pt", weights_only=True)
    spec.model.load_state_dict(state)
    spec.model.eval()
    return ModelArtifact(
        artifact_id=meta["artifact_id"],
        backbone_id=meta["backbone_id"],
        classes=list(meta["classes"]),
        input_size=int(meta["input_size"]),
        normalize_mean=tuple(meta["normalize_mean"]),
        normalize_std=tuple(meta["normalize_std"]),
        config=meta.get("config", {}),
        history=[EpochRecord(**h) for h in meta.get("history", [])],
        model=spec.model,
    )
