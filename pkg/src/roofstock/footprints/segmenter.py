"""Prompted-segmentation adapter contract and the deterministic test stub.

The real text-prompted backend (an external instance-segmentation model)
plugs in behind :class:`PromptedSegmenter`; CI runs on the stub, which
needs no model weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import numpy as np

from roofstock.errors import ConfigurationError, PipelineError

DEFAULT_PROMPT = "house"
DEFAULT_BOX_THRESHOLD = 0.30
DEFAULT_TEXT_THRESHOLD = 0.30


@dataclass(frozen=True)
class SegmenterConfig:
    text_prompt: str = DEFAULT_PROMPT
    box_threshold: float = DEFAULT_BOX_THRESHOLD
    text_threshold: float = DEFAULT_TEXT_THRESHOLD

    def validate(self) -> None:
        if not self.text_prompt:
            raise ConfigurationError("text_prompt must be nonempty")
        for name in ("box_threshold", "text_threshold"):
            value = getattr(self, name)
            if not (0.0 < value <= 1.0):
                raise ConfigurationError(f"{name} must be in (0, 1], got {value}")


@dataclass(frozen=True)
class InstanceMask:
    """One detected instance: a boolean grid positioned inside the window.

    The grid is cropped to the instance's bounding box; `offset` is its
    (row, col) position in the source window frame.
    """

    grid: np.ndarray
    score: float
    offset: tuple[int, int] = (0, 0)

    def __post_init__(self):
        if self.grid.dtype != bool:
            object.__setattr__(self, "grid", self.grid.astype(bool))
        if not self.grid.any():
            raise PipelineError("instance mask has no foreground pixels")
        if not (0.0 <= self.score <= 1.0):
            raise PipelineError(f"instance score must be in [0, 1], got {self.score}")

    @property
    def pixel_count(self) -> int:
        return int(self.grid.sum())


@runtime_checkable
class PromptedSegmenter(Protocol):
    """Behavioral contract: (raster window, config) -> instance masks."""

    #: adapters safe to call from parallel workers set this to True
    reentrant: bool

    def segment(self, window: np.ndarray, cfg: SegmenterConfig) -> list[InstanceMask]:
        ...


class ThresholdStubSegmenter:
    """Deterministic stand-in: global intensity threshold + connected components.

    Pixels with mean intensity above `threshold` are foreground; each
    4-connected component becomes one instance scored by its normalized
    mean intensity. Records the last config it received so tests can assert
    thresholds are forwarded.
    """

    reentrant = True

    def __init__(self, threshold: int = 128):
        self.threshold = threshold
        self.last_config: SegmenterConfig | None = None

    def segment(self, window: np.ndarray, cfg: SegmenterConfig) -> list[InstanceMask]:
        cfg.validate()
        self.last_config = cfg
        from roofstock.footprints.vectorize import connected_components

        intensity = window.astype(np.float32).mean(axis=2) if window.ndim == 3 else window.astype(np.float32)
        foreground = intensity > self.threshold
        masks = []
        for grid, (r0, c0) in connected_components(foreground):
            h, w = grid.shape
            score = float(intensity[r0 : r0 + h, c0 : c0 + w][grid].mean() / 255.0)
            if score >= cfg.box_threshold:
                masks.append(InstanceMask(grid=grid, score=min(score, 1.0), offset=(r0, c0)))
        return masks


class FailingSegmenter:
    """Always raises; exercises the backend-failure error path."""

    reentrant = True

    def __init__(self, message: str = "backend unavailable"):
        self.message = message

    def segment(self, window: np.ndarray, cfg: SegmenterConfig) -> list[InstanceMask]:
        raise RuntimeError(self.message)


_SEGMENTERS = {"stub": ThresholdStubSegmenter}


def load_segmenter(name: str) -> PromptedSegmenter:
    """Instantiate a segmenter backend by registry name."""
    if name in _SEGMENTERS:
        return _SEGMENTERS[name]()
    if name == "langsam":
        raise ConfigurationError(
            "the 'langsam' backend needs the optional language-prompted segmentation "
            "dependencies and model weights; install them and register the adapter"
        )
    raise ConfigurationError(f"unknown segmenter backend {name!r}; available: {sorted(_SEGMENTERS)}")
