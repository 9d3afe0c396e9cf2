"""Synthetic ortho scenes for desk-scale runs and CI.

Builds a projected-CRS raster with colored rectangular "roofs" on a dark
background. Roof colors encode the material class and are separable by
construction (a nearest-mean-color rule scores 100%), so a small scratch
CNN must reach high accuracy if the pipeline is wired correctly. Two
distinct palettes simulate two regions with a distribution shift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from roofstock.geocore.raster import GeoRaster, RasterProvenance
from roofstock.geocore.transform import AffineGeoTransform
from roofstock.geocore.vector import FootprintFeature
from roofstock.dataset.schema import ROOF_MATERIAL_CLASSES

# Per-class mean colors; every color averages well above the stub
# segmenter's intensity threshold, the background well below it.
# The beta palette is a cyclic permutation of alpha's colors (plus a small
# offset), so each beta class looks most like a DIFFERENT alpha class:
# models trained on one region systematically misread the other, while a
# model trained on both can still separate all ten colors.
PALETTES = {
    "alpha": {
        "Healthy metal": (230, 140, 90),
        "Irregular metal": (90, 230, 140),
        "Concrete/cement": (140, 90, 230),
        "Blue tarpaulin": (90, 140, 230),
        "Incomplete": (230, 90, 140),
    },
    "beta": {
        "Healthy metal": (115, 210, 160),   # near alpha's Irregular metal
        "Irregular metal": (165, 70, 250),  # near alpha's Concrete/cement
        "Concrete/cement": (115, 120, 250),  # near alpha's Blue tarpaulin
        "Blue tarpaulin": (250, 70, 160),   # near alpha's Incomplete
        "Incomplete": (250, 120, 110),      # near alpha's Healthy metal
    },
}

BACKGROUND = (24, 26, 22)
COLOR_NOISE = 6.0


@dataclass(frozen=True)
class SceneBuilding:
    """Ground truth for one drawn roof."""

    rect: tuple[int, int, int, int]  # row_min, col_min, row_max, col_max
    roof_material: str

    def center(self) -> tuple[float, float]:
        r0, c0, r1, c1 = self.rect
        return ((r0 + r1) / 2.0, (c0 + c1) / 2.0)


def build_scene(
    raster_id: str,
    n_buildings: int = 260,
    size: int = 2000,
    palette: str = "alpha",
    seed: int = 7,
    pixel_size_m: float = 0.2,
    source: str = "drone",
    year: int = 2017,
) -> tuple[GeoRaster, list[SceneBuilding]]:
    """Draw non-overlapping rectangular roofs over all material classes.

    Buildings sit in a jittered grid with clear gaps so an intensity
    threshold separates instances. The CRS is a projected meter grid.
    """
    rng = np.random.default_rng(seed)
    colors = PALETTES[palette]
    classes = list(ROOF_MATERIAL_CLASSES)

    cell = 64
    margin = 1
    per_side = size // cell
    usable = [(i, j) for i in range(margin, per_side - margin) for j in range(margin, per_side - margin)]
    if n_buildings > len(usable):
        raise ValueError(f"cannot place {n_buildings} buildings in {len(usable)} grid cells")
    chosen = rng.choice(len(usable), size=n_buildings, replace=False)

    img = np.zeros((size, size, 3), dtype=np.float64)
    img[:, :] = BACKGROUND
    buildings = []
    for order, cell_idx in enumerate(sorted(chosen.tolist())):
        gi, gj = usable[cell_idx]
        label = classes[order % len(classes)]
        h = int(rng.integers(24, 49))
        w = int(rng.integers(24, 49))
        max_jitter_r = cell - h - 8
        max_jitter_c = cell - w - 8
        r0 = gi * cell + 4 + int(rng.integers(0, max_jitter_r + 1))
        c0 = gj * cell + 4 + int(rng.integers(0, max_jitter_c + 1))
        block = np.asarray(colors[label], dtype=np.float64) + rng.normal(0.0, COLOR_NOISE, size=(h, w, 3))
        img[r0 : r0 + h, c0 : c0 + w] = block
        buildings.append(SceneBuilding(rect=(r0, c0, r0 + h, c0 + w), roof_material=label))

    raster = GeoRaster(
        raster_id=raster_id,
        data=np.clip(img, 0, 255).astype(np.uint8),
        transform=AffineGeoTransform(
            origin_x=500_000.0, origin_y=1_700_000.0, pixel_width=pixel_size_m, pixel_height=-pixel_size_m
        ),
        crs="EPSG:32620",
        provenance=RasterProvenance(
            source=source, year=year, provider="synthetic", resolution_cm_px=pixel_size_m * 100.0
        ),
    )
    return raster, buildings


def truth_label_for_footprint(
    feature: FootprintFeature, raster: GeoRaster, buildings: list[SceneBuilding]
) -> str | None:
    """Material label of the drawn roof whose rectangle contains the footprint center."""
    from roofstock.geocore.transform import world_to_pixel
    from roofstock.geocore.vector import polygon_centroid

    cx, cy = polygon_centroid(feature.polygon)
    row, col = world_to_pixel(raster.transform, cx, cy)
    best, best_dist = None, math.inf
    for b in buildings:
        r0, c0, r1, c1 = b.rect
        if r0 <= row < r1 and c0 <= col < c1:
            cr, cc = b.center()
            dist = (cr - row) ** 2 + (cc - col) ** 2
            if dist < best_dist:
                best, best_dist = b.roof_material, dist
    return best


def pixel_mean_oracle(image: np.ndarray, palette: str = "alpha") -> str:
    """Reference classifier: nearest palette color to the mean foreground pixel."""
    flat = image.reshape(-1, image.shape[-1]).astype(np.float64)
    foreground = flat[flat.mean(axis=1) > 80.0]
    if foreground.size == 0:
        foreground = flat
    mean = foreground.mean(axis=0)
    colors = PALETTES[palette]
    return min(colors, key=lambda cls: float(((mean - np.asarray(colors[cls])) ** 2).sum()))
