"""Georeferenced 8-bit rasters, windowed reads, and imagery metadata.

Raster access goes through a small reader adapter so the core stays
testable without imagery assets: tests use :class:`InMemoryRasterReader`,
real files go through :class:`ImageFileRasterReader` (Pillow-backed,
georeferencing and provenance from a key=value sidecar file).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import numpy as np
from PIL import Image

from roofstock.errors import ConfigurationError, ValidationError
from roofstock.geocore.transform import AffineGeoTransform

log = logging.getLogger(__name__)

VALID_SOURCES = ("aircraft", "drone")


@dataclass(frozen=True)
class RasterProvenance:
    """Acquisition metadata, mirroring the imagery inventory columns."""

    source: str = "drone"
    year: int = 0
    provider: str = ""
    resolution_cm_px: float = 1.0

    def validate(self) -> None:
        if self.source not in VALID_SOURCES:
            raise ValidationError(f"provenance source must be one of {VALID_SOURCES}, got {self.source!r}")
        if self.resolution_cm_px <= 0:
            raise ValidationError(f"resolution_cm_px must be > 0, got {self.resolution_cm_px}")


@dataclass(frozen=True)
class GeoRaster:
    """Immutable georeferenced pixel grid. Safe for concurrent reads."""

    raster_id: str
    data: np.ndarray  # uint8, shape (height, width, band_count)
    transform: AffineGeoTransform
    crs: str = "EPSG:4326"
    provenance: RasterProvenance = field(default_factory=RasterProvenance)

    def __post_init__(self):
        if self.data.dtype != np.uint8:
            raise ValidationError(f"raster data must be uint8, got {self.data.dtype}")
        if self.data.ndim == 2:
            object.__setattr__(self, "data", self.data[:, :, None])
        if self.data.ndim != 3 or self.data.shape[2] not in (1, 3):
            raise ValidationError(f"raster must have 1 or 3 bands, got shape {self.data.shape}")
        self.transform.validate()
        self.provenance.validate()

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def band_count(self) -> int:
        return self.data.shape[2]


def read_window(r: GeoRaster, row_min: int, col_min: int, row_max: int, col_max: int) -> np.ndarray:
    """Read a pixel window, zero-filling everything outside the raster extent.

    The rectangle is inclusive-exclusive. A window fully outside the extent
    logs a warning and returns an all-zero patch.
    """
    if row_max <= row_min or col_max <= col_min:
        raise ValidationError(
            f"window must have positive extent, got rows [{row_min},{row_max}) cols [{col_min},{col_max})"
        )
    h, w = row_max - row_min, col_max - col_min
    patch = np.zeros((h, w, r.band_count), dtype=np.uint8)

    src_r0, src_r1 = max(row_min, 0), min(row_max, r.height)
    src_c0, src_c1 = max(col_min, 0), min(col_max, r.width)
    if src_r0 >= src_r1 or src_c0 >= src_c1:
        log.warning(
            "window rows [%d,%d) cols [%d,%d) lies fully outside raster %s (%dx%d); returning zeros",
            row_min, row_max, col_min, col_max, r.raster_id, r.height, r.width,
        )
        return patch

    patch[src_r0 - row_min : src_r1 - row_min, src_c0 - col_min : src_c1 - col_min] = r.data[
        src_r0:src_r1, src_c0:src_c1
    ]
    return patch


class RasterReader(Protocol):
    """Adapter contract for raster sources."""

    def load(self, ref: str) -> GeoRaster:
        ...


class InMemoryRasterReader:
    """Reader over a dict of prebuilt rasters; used by tests and synthetic scenes."""

    def __init__(self, rasters: dict[str, GeoRaster] | None = None):
        self.rasters = dict(rasters or {})

    def add(self, raster: GeoRaster) -> None:
        self.rasters[raster.raster_id] = raster

    def load(self, ref: str) -> GeoRaster:
        if ref not in self.rasters:
            raise FileNotFoundError(f"no in-memory raster named {ref!r}")
        return self.rasters[ref]


# Sidecar keys describing georeferencing; the rest mirror the inventory columns.
_TRANSFORM_KEYS = ("origin_x", "origin_y", "pixel_width", "pixel_height", "row_rotation", "col_rotation")


def load_provenance(path: str | Path) -> dict[str, str]:
    """Parse a key=value sidecar metadata file (one pair per line, # comments)."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


class ImageFileRasterReader:
    """Loads PNG/TIFF imagery with georeferencing from a `<stem>.meta` sidecar.

    Embedded GeoTIFF tags are not parsed; a GDAL-backed reader would slot in
    behind the same protocol.
    """

    def load(self, ref: str) -> GeoRaster:
        path = Path(ref)
        if not path.exists():
            raise FileNotFoundError(f"raster file not found: {path}")
        meta_path = path.with_suffix(".meta")
        if not meta_path.exists():
            raise FileNotFoundError(f"sidecar metadata not found: {meta_path}")
        meta = load_provenance(meta_path)

        img = Image.open(path)
        if img.mode not in ("L", "RGB"):
            img = img.convert("RGB")
        data = np.asarray(img, dtype=np.uint8)

        try:
            transform = AffineGeoTransform(
                origin_x=float(meta.get("origin_x", 0.0)),
                origin_y=float(meta.get("origin_y", 0.0)),
                pixel_width=float(meta.get("pixel_width", 1.0)),
                pixel_height=float(meta.get("pixel_height", -1.0)),
                row_rotation=float(meta.get("row_rotation", 0.0)),
                col_rotation=float(meta.get("col_rotation", 0.0)),
            )
            provenance = RasterProvenance(
                source=meta.get("source", "drone"),
                year=int(meta.get("year", 0)),
                provider=meta.get("provider", ""),
                resolution_cm_px=float(meta.get("resolution_cm_px", 1.0)),
            )
        except ValueError as exc:
            raise ConfigurationError(f"bad value in {meta_path}: {exc}") from exc

        return GeoRaster(
            raster_id=meta.get("raster_id", path.stem),
            data=data,
            transform=transform,
            crs=meta.get("crs", "EPSG:4326"),
            provenance=provenance,
        )


def load_raster(ref: str, reader: RasterReader | None = None) -> GeoRaster:
    """Load a raster through the given reader (defaults to the image-file reader)."""
    return (reader or ImageFileRasterReader()).load(ref)


def save_raster(raster: GeoRaster, path: str | Path) -> Path:
    """Write raster pixels as PNG plus the georeferencing/provenance sidecar."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = raster.data[:, :, 0] if raster.band_count == 1 else raster.data
    Image.fromarray(data).save(path)
    t, p = raster.transform, raster.provenance
    lines = [
        f"raster_id={raster.raster_id}",
        f"crs={raster.crs}",
        f"origin_x={t.origin_x!r}",
        f"origin_y={t.origin_y!r}",
        f"pixel_width={t.pixel_width!r}",
        f"pixel_height={t.pixel_height!r}",
        f"row_rotation={t.row_rotation!r}",
        f"col_rotation={t.col_rotation!r}",
        f"source={p.source}",
        f"year={p.year}",
        f"provider={p.provider}",
        f"resolution_cm_px={p.resolution_cm_px!r}",
    ]
    path.with_suffix(".meta").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
