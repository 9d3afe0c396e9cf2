"""Train-time augmentation: random flips then a random rotation.

Order is fixed (horizontal flip, vertical flip, rotate) so a seeded replay
reproduces the exact pixel output. Per-sample RNG streams are derived from
(run seed, row index), which keeps parallel data loading deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image

from roofstock.errors import ValidationError

ROTATION_RANGE_DEG = 90.0
FLIP_PROBABILITY = 0.5


@dataclass(frozen=True)
class AugmentParams:
    flip_horizontal: bool
    flip_vertical: bool
    rotation_deg: float


def rng_for_sample(seed: int, index: int, epoch: int = 0) -> np.random.Generator:
    """Independent RNG stream for one sample of one epoch."""
    return np.random.default_rng([seed, epoch, index])


def draw_augmentation(rng: np.random.Generator) -> AugmentParams:
    """Sample flip/rotation parameters: Bernoulli(0.5) flips, angle ~ U[-90, 90]."""
    return AugmentParams(
        flip_horizontal=bool(rng.random() < FLIP_PROBABILITY),
        flip_vertical=bool(rng.random() < FLIP_PROBABILITY),
        rotation_deg=float(rng.uniform(-ROTATION_RANGE_DEG, ROTATION_RANGE_DEG)),
    )


def apply_augmentation(img: np.ndarray, params: AugmentParams) -> np.ndarray:
    """Apply flips then rotation about the center with zero fill; shape preserved."""
    if img.ndim not in (2, 3):
        raise ValidationError(f"expected HxW or HxWxC image, got shape {img.shape}")
    if img.shape[0] != img.shape[1]:
        raise ValidationError(f"augmentation expects a square image, got {img.shape[0]}x{img.shape[1]}")

    out = img
    if params.flip_horizontal:
        out = np.flip(out, axis=1)
    if params.flip_vertical:
        out = np.flip(out, axis=0)
    if params.rotation_deg != 0.0:
        squeeze = out.ndim == 3 and out.shape[2] == 1
        pil = Image.fromarray(out[:, :, 0] if squeeze else out)
        # PIL rotates counter-clockwise, about the image center, zero-filling corners
        pil = pil.rotate(params.rotation_deg, resample=Image.BILINEAR, fillcolor=0)
        out = np.asarray(pil, dtype=np.uint8)
        if squeeze:
            out = out[:, :, None]
    return np.ascontiguousarray(out)


def augment(img: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Draw and apply one augmentation."""
    return apply_augmentation(img, draw_augmentation(rng))
