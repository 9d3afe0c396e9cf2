"""Quantified misalignment diagnosis between two footprint collections.

Third-party footprint layers can be offset from the underlying imagery by
several meters; this report measures how badly a candidate layer matches
a reference delineation.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass

from roofstock.geocore.vector import FootprintFeature, metric_distance, to_shapely


@dataclass(frozen=True)
class AlignmentReport:
    mean_iou: float
    median_centroid_offset_m: float
    matched_fraction: float
    matched: int = 0
    total: int = 0


def alignment_report(
    a: list[FootprintFeature], b: list[FootprintFeature], crs: str = "EPSG:4326"
) -> AlignmentReport:
    """Match each feature of `a` to its greatest-IoU counterpart in `b`.

    Any positive overlap counts as a match; features without one drag
    matched_fraction and mean_iou down. Offsets are centroid distances in
    meters via local metric scaling. Both collections must share one CRS.
    """
    if not a or not b:
        return AlignmentReport(mean_iou=0.0, median_centroid_offset_m=0.0, matched_fraction=0.0, total=len(a))

    shapes_b = [to_shapely(f.polygon) for f in b]
    ious: list[float] = []
    offsets: list[float] = []
    matched = 0
    for feature in a:
        shape_a = to_shapely(feature.polygon)
        best_iou, best_j = 0.0, -1
        for j, shape_b in enumerate(shapes_b):
            if not shape_a.intersects(shape_b):
                continue
            inter = shape_a.intersection(shape_b).area
            union = shape_a.area + shape_b.area - inter
            iou = inter / union if union > 0 else 0.0
            if iou > best_iou:
                best_iou, best_j = iou, j
        ious.append(best_iou)
        if best_j >= 0:
            matched += 1
            ca, cb = shape_a.centroid, shapes_b[best_j].centroid
            offsets.append(metric_distance((ca.x, ca.y), (cb.x, cb.y), crs))

    return AlignmentReport(
        mean_iou=sum(ious) / len(ious),
        median_centroid_offset_m=statistics.median(offsets) if offsets else 0.0,
        matched_fraction=matched / len(a),
        matched=matched,
        total=len(a),
    )
