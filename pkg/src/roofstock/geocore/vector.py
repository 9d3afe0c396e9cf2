"""Polygon footprints and planar geometry helpers.

Rings are lists of (x, y) tuples in world coordinates, explicitly closed
(first vertex repeated at the end). All geometry within one pipeline run
shares a single CRS, carried as an opaque identifier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import shapely

from roofstock.errors import ValidationError

Point = tuple[float, float]
Ring = list[Point]

# WGS84-family identifiers treated as degree-based; anything else is assumed metric.
_GEOGRAPHIC_CRS = {"EPSG:4326", "WGS84", "OGC:CRS84", "CRS84", "4326"}

# Meters per degree near the equator (equirectangular approximation).
M_PER_DEG_LAT = 110_540.0
M_PER_DEG_LON = 111_320.0


def crs_is_geographic(crs: str) -> bool:
    return crs.strip().upper() in _GEOGRAPHIC_CRS


def ring_area(ring: Ring) -> float:
    """Signed shoelace area of a closed ring (positive = counter-clockwise)."""
    area = 0.0
    for (x0, y0), (x1, y1) in zip(ring, ring[1:]):
        area += x0 * y1 - x1 * y0
    return area / 2.0


def ring_is_closed(ring: Ring) -> bool:
    return len(ring) >= 2 and ring[0] == ring[-1]


@dataclass(frozen=True)
class Polygon:
    """One exterior ring plus zero or more holes, all closed."""

    exterior: Ring
    holes: tuple[Ring, ...] = ()

    def validate(self) -> None:
        for ring in self.rings():
            if not ring_is_closed(ring):
                raise ValidationError("polygon ring is not closed (first vertex != last)")
            if len(ring) < 4:
                raise ValidationError(f"closed ring needs >= 4 vertices, got {len(ring)}")
        if ring_area(self.exterior) == 0.0:
            raise ValidationError("polygon has zero area")

    def rings(self) -> Iterator[Ring]:
        yield self.exterior
        yield from self.holes


def polygon_area(poly: Polygon) -> float:
    """Unsigned area: |exterior| minus hole areas."""
    area = abs(ring_area(poly.exterior))
    for hole in poly.holes:
        area -= abs(ring_area(hole))
    return area


def polygon_centroid(poly: Polygon) -> Point:
    c = to_shapely(poly).centroid
    return (c.x, c.y)


def to_shapely(poly: Polygon) -> shapely.Polygon:
    return shapely.Polygon(poly.exterior, [list(h) for h in poly.holes])


def from_shapely(geom: shapely.Polygon) -> Polygon:
    exterior = [(float(x), float(y)) for x, y in geom.exterior.coords]
    holes = tuple([(float(x), float(y)) for x, y in ring.coords] for ring in geom.interiors)
    return Polygon(exterior=exterior, holes=holes)


def meters_per_unit(crs: str, reference_y: float = 0.0) -> tuple[float, float]:
    """Local metric scale (m per unit in x, m per unit in y).

    Geographic CRSs use an equirectangular approximation at the reference
    latitude; projected CRSs are assumed to be in meters already.
    """
    if crs_is_geographic(crs):
        return M_PER_DEG_LON * math.cos(math.radians(reference_y)), M_PER_DEG_LAT
    return 1.0, 1.0


def world_area_m2(poly: Polygon, crs: str) -> float:
    """Polygon area in square meters via local metric scaling at the centroid."""
    mx, my = meters_per_unit(crs, reference_y=polygon_centroid(poly)[1])
    return polygon_area(poly) * mx * my


def metric_distance(a: Point, b: Point, crs: str) -> float:
    """Distance in meters between two world points."""
    mx, my = meters_per_unit(crs, reference_y=(a[1] + b[1]) / 2.0)
    return math.hypot((a[0] - b[0]) * mx, (a[1] - b[1]) * my)


@dataclass(frozen=True)
class FootprintFeature:
    """One building polygon with identity, provenance, and attribute slots."""

    id: str
    polygon: Polygon
    properties: dict = field(default_factory=dict)

    def validate(self) -> None:
        if not self.id:
            raise ValidationError("footprint id must be nonempty")
        self.polygon.validate()

    def area(self) -> float:
        return polygon_area(self.polygon)
