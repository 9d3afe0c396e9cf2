"""Join predictions back onto footprints: classification and change maps.

Outputs are GeoJSON with a fixed class -> fill-color table embedded in the
properties so any viewer renders the maps consistently.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from roofstock.errors import ValidationError
from roofstock.geocore.raster import GeoRaster
from roofstock.geocore.vector import FootprintFeature, to_shapely
from roofstock.classifier.predict import predict
from roofstock.classifier.train import ModelArtifact
from roofstock.tiling import bounding_rect, extract_tile, pad_to_square, scale_rect

log = logging.getLogger(__name__)

DEFAULT_IOU_MATCH = 0.5

CLASS_FILL = {
    "Healthy metal": "#2ca02c",
    "Irregular metal": "#ff7f0e",
    "Concrete/cement": "#8c564b",
    "Blue tarpaulin": "#1f77ff",
    "Incomplete": "#d62728",
    "Gable": "#1f77b4",
    "Hip": "#9467bd",
    "Flat": "#bcbd22",
    "No Roof": "#7f7f7f",
    "Unknown": "#808080",
}

STATUS_FILL = {
    "unchanged": "#808080",
    "changed": "#d62728",
    "appeared": "#1f77b4",
    "disappeared": "#444444",
}


@dataclass(frozen=True)
class ClassifiedFootprint:
    feature: FootprintFeature
    label: str
    confidence: float
    model_id: str
    year: int

    def __post_init__(self):
        if not (0.0 <= self.confidence <= 1.0):
            raise ValidationError(f"confidence must be in [0, 1], got {self.confidence}")


@dataclass(frozen=True)
class ChangeRecord:
    footprint_id: str
    status: str  # unchanged | changed | appeared | disappeared
    label_before: str | None
    label_after: str | None
    iou: float
    before_id: str | None = None
    after_id: str | None = None


@dataclass
class SkipReport:
    empty_tiles: list[str] = field(default_factory=list)


def classify_footprints(
    raster: GeoRaster,
    footprints: list[FootprintFeature],
    artifact: ModelArtifact,
    scale_factor: float = 1.5,
) -> tuple[list[ClassifiedFootprint], SkipReport]:
    """Tile each footprint with the standard chip rule and classify it.

    Footprints whose chip is empty (fully outside the raster) come back
    labeled "Unknown" with confidence 0 and are listed in the skip report.
    Output is ordered by footprint id.
    """
    ordered = sorted(footprints, key=lambda f: f.id)
    report = SkipReport()
    tiles, tiled_features = [], []
    skipped = []
    for feature in ordered:
        rect = scale_rect(bounding_rect(feature.polygon, raster), scale_factor)
        tile = extract_tile(raster, rect, feature.id)
        if tile.empty:
            report.empty_tiles.append(feature.id)
            skipped.append(feature)
            continue
        tiles.append((feature.id, pad_to_square(tile.image, artifact.input_size)))
        tiled_features.append(feature)

    predictions = predict(artifact, tiles) if tiles else []
    classified = [
        ClassifiedFootprint(
            feature=f,
            label=p.label,
            confidence=p.confidence,
            model_id=artifact.artifact_id,
            year=raster.provenance.year,
        )
        for f, p in zip(tiled_features, predictions)
    ]
    classified.extend(
        ClassifiedFootprint(
            feature=f, label="Unknown", confidence=0.0, model_id=artifact.artifact_id,
            year=raster.provenance.year,
        )
        for f in skipped
    )
    classified.sort(key=lambda c: c.feature.id)
    if report.empty_tiles:
        log.warning("%d footprints produced empty tiles and were labeled Unknown", len(report.empty_tiles))
    return classified, report


def classification_geojson(classified: list[ClassifiedFootprint], task: str, crs: str = "EPSG:4326") -> dict:
    label_key = task  # roof_type or roof_material
    features = []
    for item in sorted(classified, key=lambda c: c.feature.id):
        poly = item.feature.polygon
        coords = [[list(pt) for pt in poly.exterior]] + [[list(pt) for pt in h] for h in poly.holes]
        features.append(
            {
                "type": "Feature",
                "id": item.feature.id,
                "geometry": {"type": "Polygon", "coordinates": coords},
                "properties": {
                    "id": item.feature.id,
                    label_key: item.label,
                    "confidence": round(item.confidence, 6),
                    "model_id": item.model_id,
                    "year": item.year,
                    "fill": CLASS_FILL.get(item.label, CLASS_FILL["Unknown"]),
                },
            }
        )
    return {"type": "FeatureCollection", "crs": crs, "features": features}


def write_classification_map(
    classified: list[ClassifiedFootprint],
    task: str,
    raster_id: str,
    out_dir: str | Path,
    crs: str = "EPSG:4326",
) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"classified_{raster_id}.geojson"
    path.write_text(json.dumps(classification_geojson(classified, task, crs), indent=2), encoding="utf-8")
    return path


def change_map(
    before: list[ClassifiedFootprint],
    after: list[ClassifiedFootprint],
    iou_match: float = DEFAULT_IOU_MATCH,
) -> list[ChangeRecord]:
    """Greedy best-IoU matching of two classified epochs.

    Pairs above the threshold are unchanged/changed by label equality;
    unmatched before-footprints disappeared, unmatched after-footprints
    appeared.
    """
    before = sorted(before, key=lambda c: c.feature.id)
    after = sorted(after, key=lambda c: c.feature.id)
    shapes_b = [to_shapely(c.feature.polygon) for c in before]
    shapes_a = [to_shapely(c.feature.polygon) for c in after]

    pairs = []
    for i, sb in enumerate(shapes_b):
        for j, sa in enumerate(shapes_a):
            if not sb.intersects(sa):
                continue
            inter = sb.intersection(sa).area
            union = sb.area + sa.area - inter
            iou = inter / union if union > 0 else 0.0
            if iou >= iou_match:
                pairs.append((iou, i, j))
    # Highest IoU first; ties broken by id order for determinism.
    pairs.sort(key=lambda t: (-t[0], t[1], t[2]))

    matched_b: dict[int, tuple[int, float]] = {}
    matched_a: set[int] = set()
    for iou, i, j in pairs:
        if i in matched_b or j in matched_a:
            continue
        matched_b[i] = (j, iou)
        matched_a.add(j)

    records = []
    for i, item in enumerate(before):
        if i in matched_b:
            j, iou = matched_b[i]
            other = after[j]
            status = "unchanged" if item.label == other.label else "changed"
            records.append(
                ChangeRecord(
                    footprint_id=item.feature.id,
                    status=status,
                    label_before=item.label,
                    label_after=other.label,
                    iou=round(iou, 6),
                    before_id=item.feature.id,
                    after_id=other.feature.id,
                )
            )
        else:
            records.append(
                ChangeRecord(
                    footprint_id=item.feature.id,
                    status="disappeared",
                    label_before=item.label,
                    label_after=None,
                    iou=0.0,
                    before_id=item.feature.id,
                )
            )
    for j, item in enumerate(after):
        if j not in matched_a:
            records.append(
                ChangeRecord(
                    footprint_id=item.feature.id,
                    status="appeared",
                    label_before=None,
                    label_after=item.label,
                    iou=0.0,
                    after_id=item.feature.id,
                )
            )
    return records


def change_geojson(
    records: list[ChangeRecord],
    before: list[ClassifiedFootprint],
    after: list[ClassifiedFootprint],
    crs: str = "EPSG:4326",
) -> dict:
    """Change records as GeoJSON; geometry comes from the newer epoch when present."""
    before_by_id = {c.feature.id: c for c in before}
    after_by_id = {c.feature.id: c for c in after}
    features = []
    for rec in records:
        source = after_by_id.get(rec.after_id) if rec.after_id else before_by_id.get(rec.before_id)
        poly = source.feature.polygon
        coords = [[list(pt) for pt in poly.exterior]] + [[list(pt) for pt in h] for h in poly.holes]
        features.append(
            {
                "type": "Feature",
                "id": rec.footprint_id,
                "geometry": {"type": "Polygon", "coordinates": coords},
                "properties": {
                    "id": rec.footprint_id,
                    "status": rec.status,
                    "label_before": rec.label_before,
                    "label_after": rec.label_after,
                    "iou": rec.iou,
                    "fill": STATUS_FILL[rec.status],
                },
            }
        )
    return {"type": "FeatureCollection", "crs": crs, "features": features}


def write_change_map(
    records: list[ChangeRecord],
    before: list[ClassifiedFootprint],
    after: list[ClassifiedFootprint],
    t0: str,
    t1: str,
    out_dir: str | Path,
    crs: str = "EPSG:4326",
) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"changes_{t0}_{t1}.geojson"
    path.write_text(json.dumps(change_geojson(records, before, after, crs), indent=2), encoding="utf-8")
    return path
