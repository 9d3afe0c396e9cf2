"""Rooftop chip extraction.

Each building polygon becomes one image tile: axis-aligned bounding
rectangle in pixel space, scaled 1.5x about its center, cropped with
zero fill, then letterboxed to the model input size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from roofstock.errors import ValidationError
from roofstock.geocore.raster import GeoRaster, read_window
from roofstock.geocore.transform import pixel_to_world, world_to_pixel
from roofstock.geocore.vector import Polygon

DEFAULT_SCALE_FACTOR = 1.5


@dataclass(frozen=True)
class PixelRect:
    """Inclusive-exclusive pixel rectangle."""

    row_min: int
    col_min: int
    row_max: int
    col_max: int

    def __post_init__(self):
        if self.row_max <= self.row_min or self.col_max <= self.col_min:
            raise ValidationError(f"degenerate rectangle {self}")

    @property
    def height(self) -> int:
        return self.row_max - self.row_min

    @property
    def width(self) -> int:
        return self.col_max - self.col_min

    @property
    def center(self) -> tuple[float, float]:
        return ((self.row_min + self.row_max) / 2.0, (self.col_min + self.col_max) / 2.0)

    def area(self) -> int:
        return self.height * self.width


@dataclass(frozen=True)
class RoofTile:
    """One rooftop chip plus its georeference and provenance."""

    tile_id: str
    image: np.ndarray  # H x W x bands, uint8
    footprint_id: str
    raster_id: str
    pixel_rect: PixelRect
    world_rect: tuple[float, float, float, float]  # (x_min, y_min, x_max, y_max)
    source: str
    year: int
    empty: bool = False
    target_size: int | None = None


def bounding_rect(poly: Polygon, raster: GeoRaster) -> PixelRect:
    """Axis-aligned pixel envelope of a world polygon, rounded outward."""
    rows, cols = [], []
    for x, y in poly.exterior:
        r, c = world_to_pixel(raster.transform, x, y)
        rows.append(r)
        cols.append(c)
    row_min, row_max = math.floor(min(rows)), math.ceil(max(rows))
    col_min, col_max = math.floor(min(cols)), math.ceil(max(cols))
    if row_max <= row_min or col_max <= col_min:
        raise ValidationError("polygon projects to a zero-extent rectangle")
    return PixelRect(row_min, col_min, row_max, col_max)


def scale_rect(rect: PixelRect, factor: float = DEFAULT_SCALE_FACTOR) -> PixelRect:
    """Grow a rectangle about its center, rounding outward."""
    if factor < 1:
        raise ValidationError(f"scale factor must be >= 1, got {factor}")
    cr, cc = rect.center
    half_h = rect.height * factor / 2.0
    half_w = rect.width * factor / 2.0
    return PixelRect(
        row_min=math.floor(cr - half_h),
        col_min=math.floor(cc - half_w),
        row_max=math.ceil(cr + half_h),
        col_max=math.ceil(cc + half_w),
    )


def extract_tile(raster: GeoRaster, rect: PixelRect, footprint_id: str) -> RoofTile:
    """Crop one chip; out-of-extent margins are zero-filled.

    An all-zero crop is kept but flagged `empty` so manifests can exclude it.
    """
    image = read_window(raster, rect.row_min, rect.col_min, rect.row_max, rect.col_max)
    x0, y0 = pixel_to_world(raster.transform, rect.row_min, rect.col_min)
    x1, y1 = pixel_to_world(raster.transform, rect.row_max, rect.col_max)
    return RoofTile(
        tile_id=f"{raster.raster_id}__{footprint_id}",
        image=image,
        footprint_id=footprint_id,
        raster_id=raster.raster_id,
        pixel_rect=rect,
        world_rect=(min(x0, x1), min(y0, y1), max(x0, x1), max(y0, y1)),
        source=raster.provenance.source,
        year=raster.provenance.year,
        empty=not image.any(),
    )


def pad_to_square(img: np.ndarray, target: int) -> np.ndarray:
    """Letterbox a chip to target x target.

    Oversized chips are downscaled (bilinear, aspect preserved) so the long
    side equals `target`; the rest is zero padding, centered, with odd
    remainders going right/bottom.
    """
    if target < 1:
        raise ValidationError(f"target size must be >= 1, got {target}")
    if img.size == 0:
        raise ValidationError("cannot pad an empty image")
    if img.ndim == 2:
        img = img[:, :, None]
    h, w = img.shape[:2]

    if max(h, w) > target:
        scale = target / max(h, w)
        new_h = target if h >= w else max(1, round(h * scale))
        new_w = target if w > h else max(1, round(w * scale))
        pil = Image.fromarray(img[:, :, 0] if img.shape[2] == 1 else img)
        pil = pil.resize((new_w, new_h), resample=Image.BILINEAR)
        img = np.asarray(pil, dtype=np.uint8)
        if img.ndim == 2:
            img = img[:, :, None]
        h, w = new_h, new_w

    pad_top = (target - h) // 2
    pad_left = (target - w) // 2
    out = np.zeros((target, target, img.shape[2]), dtype=np.uint8)
    out[pad_top : pad_top + h, pad_left : pad_left + w] = img
    return out


def tile_filename(tile: RoofTile) -> str:
    return f"{tile.raster_id}__{tile.footprint_id}.png"


def save_tile_png(tile: RoofTile, out_dir: str | Path, target: int | None = None) -> Path:
    """Write the chip (optionally padded) as PNG named `<raster>__<footprint>.png`."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    image = pad_to_square(tile.image, target) if target else tile.image
    data = image[:, :, 0] if image.shape[2] == 1 else image
    path = out_dir / tile_filename(tile)
    Image.fromarray(data).save(path)
    return path


def load_tile_png(path: str | Path) -> np.ndarray:
    img = Image.open(path)
    if img.mode not in ("L", "RGB"):
        img = img.convert("RGB")
    data = np.asarray(img, dtype=np.uint8)
    return data[:, :, None] if data.ndim == 2 else data
