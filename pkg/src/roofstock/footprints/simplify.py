"""Douglas-Peucker polyline and ring simplification.

Deviation is measured as perpendicular distance to the chord segment
(clamped to its endpoints), which stays well-defined on closed rings
where the chord endpoints coincide.
"""

from __future__ import annotations

import math

from roofstock.errors import ValidationError
from roofstock.geocore.vector import Point, Polygon, Ring, ring_area

DEFAULT_TOLERANCE = 5e-6


def point_segment_distance(p: Point, a: Point, b: Point) -> float:
    """Distance from p to the segment [a, b]."""
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    seg2 = dx * dx + dy * dy
    if seg2 == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / seg2
    t = min(1.0, max(0.0, t))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def simplify_polyline(points: list[Point], tolerance: float) -> list[Point]:
    """Keep the endpoints and every vertex deviating more than `tolerance`.

    tolerance 0 returns the input verbatim; any positive tolerance drops
    exactly-collinear interior vertices.
    """
    if tolerance < 0:
        raise ValidationError(f"tolerance must be >= 0, got {tolerance}")
    if tolerance == 0 or len(points) < 3:
        return list(points)

    keep = [False] * len(points)
    keep[0] = keep[-1] = True
    stack = [(0, len(points) - 1)]
    while stack:
        lo, hi = stack.pop()
        if hi <= lo + 1:
            continue
        d_max, i_max = -1.0, -1
        a, b = points[lo], points[hi]
        for i in range(lo + 1, hi):
            d = point_segment_distance(points[i], a, b)
            if d > d_max:
                d_max, i_max = d, i
        if d_max > tolerance:
            keep[i_max] = True
            stack.append((lo, i_max))
            stack.append((i_max, hi))
    return [p for p, k in zip(points, keep) if k]


def simplify_ring(ring: Ring, tolerance: float) -> Ring:
    """Simplify a closed ring; returns the input if the result would collapse."""
    simplified = simplify_polyline(ring, tolerance)
    if len(simplified) < 4 or ring_area(simplified) == 0.0:
        return list(ring)
    return simplified


def simplify_dp(poly: Polygon, tolerance: float = DEFAULT_TOLERANCE) -> Polygon:
    """Douglas-Peucker simplification of every ring of a polygon."""
    return Polygon(
        exterior=simplify_ring(poly.exterior, tolerance),
        holes=tuple(simplify_ring(h, tolerance) for h in poly.holes),
    )
