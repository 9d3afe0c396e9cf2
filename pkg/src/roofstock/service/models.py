"""Request/response models for the pipeline and annotation APIs."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class SegmentRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    raster_path: str
    out_path: str
    text_prompt: str = "house"
    box_threshold: float = Field(default=0.30, gt=0.0, le=1.0)
    text_threshold: float = Field(default=0.30, gt=0.0, le=1.0)
    backend: str = "stub"
    min_area_m2: float = Field(default=9.0, ge=0.0)
    simplify_tolerance: float = Field(default=5e-6, ge=0.0)


class SegmentResponse(BaseModel):
    out_path: str
    raster_id: str
    footprint_count: int
    crs: str


class TileRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    raster_path: str
    footprints_path: str
    out_dir: str
    manifest_path: str
    country: str = ""
    scale_factor: float = Field(default=1.5, ge=1.0)
    tile_size: int = Field(default=224, ge=1)
    include_empty: bool = False


class TileResponse(BaseModel):
    manifest_path: str
    tile_count: int
    skipped_empty: int


class SplitRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    manifest_path: str
    out_path: str
    task: str
    test_frac: float = Field(default=0.2, gt=0.0, lt=1.0)
    seed: int = 42


class SplitResponse(BaseModel):
    out_path: str
    train: int
    test: int
    test_per_class: dict[str, int]


class TrainRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    manifest_path: str
    tiles_root: str | None = None
    out_dir: str
    task: str
    backbone_id: str = "tiny_test"
    input_size: int | None = None
    batch_size: int = Field(default=32, ge=1)
    max_epochs: int = Field(default=60, ge=0)
    initial_lr: float = Field(default=1e-5, gt=0.0)
    plateau_patience: int = Field(default=7, ge=1)
    plateau_factor: float = Field(default=0.1, gt=0.0, lt=1.0)
    label_smoothing: float = Field(default=0.1, ge=0.0, lt=1.0)
    monitor_frac: float = Field(default=0.1, ge=0.0, lt=1.0)
    seed: int = 42


class TrainResponse(BaseModel):
    artifact_dir: str
    artifact_id: str
    classes: list[str]
    epochs_run: int
    best_val_loss: float | None
    final_lr: float | None


class EvalRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    artifacts: dict[str, str]  # train source name -> artifact dir
    test_manifests: dict[str, str]  # test source name -> manifest path
    task: str
    tiles_root: str | None = None
    out_dir: str
    split: str = "test"  # evaluate rows of this split; "all" = every labeled row


class EvalCell(BaseModel):
    train_source: str
    test_source: str
    f1: float
    precision: float
    recall: float
    accuracy: float
    missing_classes: list[str] = []
    sample_count: int = 0


class EvalResponse(BaseModel):
    report_markdown: str
    report_csv: str
    cells: list[EvalCell]


class MapgenRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    raster_path: str
    footprints_path: str
    artifact_dir: str
    out_dir: str
    scale_factor: float = Field(default=1.5, ge=1.0)


class MapgenResponse(BaseModel):
    map_path: str
    label_counts: dict[str, int]
    skipped: int


class NextTileResponse(BaseModel):
    tile_id: str | None
    image_url: str | None
    task: str
    classes: list[str]
    done: bool
    pending: int = 0
    lease_seconds: float = 30.0


class LabelRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    tile_id: str
    task: str
    label: str
    annotator: str


class LabelResponse(BaseModel):
    tile_id: str
    task: str
    label: str
    seq: int
    labeled: int
    total: int


class ReleaseRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    tile_id: str
    annotator: str


class ProgressResponse(BaseModel):
    task: str
    labeled: int
    total: int
    per_class: dict[str, int]
