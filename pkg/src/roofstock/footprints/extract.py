"""End-to-end building delineation over a georeferenced raster."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from roofstock.errors import PipelineError
from roofstock.geocore.raster import GeoRaster
from roofstock.geocore.transform import pixel_to_world
from roofstock.geocore.vector import (
    FootprintFeature,
    Polygon,
    Ring,
    to_shapely,
    world_area_m2,
)
from roofstock.footprints.segmenter import PromptedSegmenter, SegmenterConfig
from roofstock.footprints.simplify import DEFAULT_TOLERANCE, simplify_dp
from roofstock.footprints.vectorize import mask_to_polygons

log = logging.getLogger(__name__)

DEFAULT_MIN_AREA_M2 = 9.0
MIN_HOLE_AREA_M2 = 1.0
OVERLAP_IOU_THRESHOLD = 0.5


@dataclass
class _Candidate:
    scan_key: tuple[float, float]
    polygon: Polygon
    score: float


def _pixel_ring_to_world(ring: Ring, raster: GeoRaster) -> Ring:
    out = []
    for x, y in ring:
        wx, wy = pixel_to_world(raster.transform, row=y, col=x)
        out.append((wx, wy))
    return out


def _to_world(poly: Polygon, raster: GeoRaster) -> Polygon:
    return Polygon(
        exterior=_pixel_ring_to_world(poly.exterior, raster),
        holes=tuple(_pixel_ring_to_world(h, raster) for h in poly.holes),
    )


def _drop_small_holes(poly: Polygon, crs: str) -> Polygon:
    # Segmentation speckle: holes below 1 m2 are noise, not courtyards.
    kept = tuple(
        h for h in poly.holes if world_area_m2(Polygon(exterior=h), crs) >= MIN_HOLE_AREA_M2
    )
    return poly if len(kept) == len(poly.holes) else Polygon(exterior=poly.exterior, holes=kept)


def _suppress_overlaps(candidates: list[_Candidate]) -> list[_Candidate]:
    """Drop the lower-scored polygon of any pair overlapping above 0.5 IoU."""
    order = sorted(range(len(candidates)), key=lambda i: -candidates[i].score)
    shapes = [to_shapely(c.polygon) for c in candidates]
    alive = [True] * len(candidates)
    for pos, i in enumerate(order):
        if not alive[i]:
            continue
        for j in order[pos + 1 :]:
            if not alive[j] or not shapes[i].intersects(shapes[j]):
                continue
            inter = shapes[i].intersection(shapes[j]).area
            union = shapes[i].area + shapes[j].area - inter
            if union > 0 and inter / union > OVERLAP_IOU_THRESHOLD:
                alive[j] = False
    return [c for c, keep in zip(candidates, alive) if keep]


def segment_buildings(
    raster: GeoRaster,
    segmenter: PromptedSegmenter,
    cfg: SegmenterConfig | None = None,
    min_area_m2: float = DEFAULT_MIN_AREA_M2,
    simplify_tolerance: float = DEFAULT_TOLERANCE,
) -> list[FootprintFeature]:
    """Delineate building footprints from a raster via prompted segmentation.

    Masks are vectorized, simplified in world coordinates, filtered by
    area, and deduplicated; ids are `<raster_id>_<index>` in scan order.
    Zero detections is an empty result, not an error.
    """
    cfg = cfg or SegmenterConfig()
    cfg.validate()
    try:
        masks = segmenter.segment(raster.data, cfg)
    except Exception as exc:
        raise PipelineError(f"segmenter backend failed on raster {raster.raster_id!r}: {exc}") from exc

    candidates: list[_Candidate] = []
    for mask in masks:
        for pixel_poly in mask_to_polygons(mask):
            xs = [x for x, _ in pixel_poly.exterior]
            ys = [y for _, y in pixel_poly.exterior]
            world = simplify_dp(_to_world(pixel_poly, raster), simplify_tolerance)
            world = _drop_small_holes(world, raster.crs)
            if world_area_m2(world, raster.crs) < min_area_m2:
                continue
            candidates.append(_Candidate(scan_key=(min(ys), min(xs)), polygon=world, score=mask.score))

    candidates = _suppress_overlaps(candidates)
    candidates.sort(key=lambda c: c.scan_key)

    features = []
    for index, cand in enumerate(candidates):
        feature = FootprintFeature(
            id=f"{raster.raster_id}_{index}",
            polygon=cand.polygon,
            properties={
                "id": f"{raster.raster_id}_{index}",
                "source": raster.provenance.source,
                "confidence": round(cand.score, 6),
            },
        )
        feature.validate()
        features.append(feature)
    log.info("raster %s: %d instances -> %d footprints", raster.raster_id, len(masks), len(features))
    return features
