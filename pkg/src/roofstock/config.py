"""Structured pipeline configuration.

Defaults are the production parameter set: prompt "house" with 0.30/0.30
thresholds, 1.5x chip scaling, 5e-6 simplification tolerance, batch 32,
60 epochs, lr 1e-5 with 0.1x decay after 7 flat epochs, label smoothing
0.1, 20% test fraction. Unknown keys are rejected. The ROOFSTOCK_SEED
environment variable overrides the seed.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError

from roofstock.errors import ConfigurationError

SEED_ENV_VAR = "ROOFSTOCK_SEED"


class SegmenterSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    text_prompt: str = "house"
    box_threshold: float = Field(default=0.30, gt=0.0, le=1.0)
    text_threshold: float = Field(default=0.30, gt=0.0, le=1.0)
    backend: str = "stub"
    min_area_m2: float = 9.0


class TilingSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scale_factor: float = Field(default=1.5, ge=1.0)
    tile_size: int = Field(default=224, ge=1)


class SplitSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    test_frac: float = Field(default=0.2, gt=0.0, lt=1.0)


class TrainSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    backbone_id: str = "tiny_test"
    input_size: int | None = None
    batch_size: int = Field(default=32, ge=1)
    max_epochs: int = Field(default=60, ge=0)
    initial_lr: float = Field(default=1e-5, gt=0.0)
    plateau_patience: int = Field(default=7, ge=1)
    plateau_factor: float = Field(default=0.1, gt=0.0, lt=1.0)
    label_smoothing: float = Field(default=0.1, ge=0.0, lt=1.0)
    monitor_frac: float = Field(default=0.1, ge=0.0, lt=1.0)


class PipelineConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    segmenter: SegmenterSettings = Field(default_factory=SegmenterSettings)
    tiling: TilingSettings = Field(default_factory=TilingSettings)
    split: SplitSettings = Field(default_factory=SplitSettings)
    train: TrainSettings = Field(default_factory=TrainSettings)
    simplify_tolerance: float = Field(default=5e-6, ge=0.0)
    seed: int = 42


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> PipelineConfig:
    """Build the config from defaults, an optional JSON/YAML file, and overrides.

    Precedence: defaults < file < overrides < ROOFSTOCK_SEED.
    """
    data: dict = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"config file not found: {path}")
        text = path.read_text(encoding="utf-8")
        data = (json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)) or {}
        if not isinstance(data, dict):
            raise ConfigurationError(f"config file must hold a mapping, got {type(data).__name__}")

    for key, value in (overrides or {}).items():
        if isinstance(value, dict) and isinstance(data.get(key), dict):
            data[key] = {**data[key], **value}
        else:
            data[key] = value

    env_seed = os.environ.get(SEED_ENV_VAR)
    if env_seed is not None:
        try:
            data["seed"] = int(env_seed)
        except ValueError as exc:
            raise ConfigurationError(f"{SEED_ENV_VAR} must be an integer, got {env_seed!r}") from exc

    try:
        return PipelineConfig(**data)
    except PydanticValidationError as exc:
        raise ConfigurationError(f"invalid pipeline config: {exc}") from exc
