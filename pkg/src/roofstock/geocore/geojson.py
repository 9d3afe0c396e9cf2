"""GeoJSON FeatureCollection ingest and emit for building footprints.

Property keys on the wire are exactly: id, source, roof_type,
roof_material, confidence. Coordinates are WGS84 lon/lat unless the
collection carries a `crs` field saying otherwise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from roofstock.errors import ValidationError
from roofstock.geocore.vector import FootprintFeature, Polygon, Ring, ring_area

PROPERTY_KEYS = ("id", "source", "roof_type", "roof_material", "confidence")

DEFAULT_CRS = "EPSG:4326"


@dataclass
class FootprintLoadReport:
    """Per-document bookkeeping of accepted/repaired/rejected geometries."""

    loaded: int = 0
    auto_closed: int = 0
    rejected: list[tuple[str, str]] = field(default_factory=list)  # (feature id, reason)

    @property
    def rejected_count(self) -> int:
        return len(self.rejected)


def _clean_ring(raw, feature_id: str, report: FootprintLoadReport) -> Ring:
    ring = [(float(x), float(y)) for x, y in raw]
    if len(ring) < 3:
        raise ValidationError(f"ring of feature {feature_id!r} has fewer than 3 vertices")
    if ring[0] != ring[-1]:
        # Missing closing vertex: auto-close rather than reject.
        ring.append(ring[0])
        report.auto_closed += 1
    if len(ring) < 4:
        raise ValidationError(f"ring of feature {feature_id!r} has fewer than 4 vertices after closing")
    if ring_area(ring) == 0.0:
        raise ValidationError(f"ring of feature {feature_id!r} has zero area")
    return ring


def _polygon_from_coords(coords, feature_id: str, report: FootprintLoadReport) -> Polygon:
    if not coords:
        raise ValidationError(f"feature {feature_id!r} has no rings")
    exterior = _clean_ring(coords[0], feature_id, report)
    holes = tuple(_clean_ring(h, feature_id, report) for h in coords[1:])
    return Polygon(exterior=exterior, holes=holes)


def _clean_properties(props: dict) -> dict:
    out = {}
    for key in PROPERTY_KEYS:
        if key in props and props[key] is not None:
            out[key] = props[key]
    return out


def load_footprints(document: dict) -> tuple[list[FootprintFeature], FootprintLoadReport]:
    """Parse a GeoJSON FeatureCollection into validated footprint features.

    MultiPolygons are split into one feature per part with `_<n>` suffixed
    ids. Invalid geometries are rejected per feature and recorded in the
    report instead of failing the whole load.
    """
    if document.get("type") != "FeatureCollection":
        raise ValidationError(f"expected a FeatureCollection, got type={document.get('type')!r}")

    report = FootprintLoadReport()
    features: list[FootprintFeature] = []

    for index, feat in enumerate(document.get("features", [])):
        props = feat.get("properties") or {}
        fid = str(props.get("id") or feat.get("id") or f"feature_{index}")
        geom = feat.get("geometry") or {}
        gtype = geom.get("type")
        try:
            if gtype == "Polygon":
                parts = [(fid, geom.get("coordinates") or [])]
            elif gtype == "MultiPolygon":
                parts = [(f"{fid}_{i}", c) for i, c in enumerate(geom.get("coordinates") or [])]
            else:
                raise ValidationError(f"feature {fid!r} has unsupported geometry type {gtype!r}")
            for part_id, coords in parts:
                polygon = _polygon_from_coords(coords, part_id, report)
                feature = FootprintFeature(id=part_id, polygon=polygon, properties=_clean_properties(props))
                feature.properties["id"] = part_id
                feature.validate()
                features.append(feature)
                report.loaded += 1
        except ValidationError as exc:
            report.rejected.append((fid, str(exc)))

    return features, report


def save_footprints(features: list[FootprintFeature], crs: str = DEFAULT_CRS) -> dict:
    """Emit a GeoJSON FeatureCollection; inverse of load_footprints."""
    out_features = []
    for feature in features:
        coords = [[list(pt) for pt in feature.polygon.exterior]]
        coords.extend([list(pt) for pt in hole] for hole in feature.polygon.holes)
        props = _clean_properties(feature.properties)
        props["id"] = feature.id
        out_features.append(
            {
                "type": "Feature",
                "id": feature.id,
                "geometry": {"type": "Polygon", "coordinates": coords},
                "properties": props,
            }
        )
    return {"type": "FeatureCollection", "crs": crs, "features": out_features}


def document_crs(document: dict) -> str:
    return document.get("crs", DEFAULT_CRS)


def read_footprints_file(path: str | Path) -> tuple[list[FootprintFeature], FootprintLoadReport, str]:
    document = json.loads(Path(path).read_text(encoding="utf-8"))
    features, report = load_footprints(document)
    return features, report, document_crs(document)


def write_footprints_file(features: list[FootprintFeature], path: str | Path, crs: str = DEFAULT_CRS) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(save_footprints(features, crs=crs), indent=2), encoding="utf-8")
    return path
