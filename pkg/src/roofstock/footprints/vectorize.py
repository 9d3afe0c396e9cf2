"""Binary masks to pixel-corner polygons.

Foreground components are 4-connected; vertices lie on pixel corners, so
the signed shoelace area of each traced ring set equals the component's
pixel count exactly. Ring orientation: exteriors counter-clockwise
(positive shoelace in (x=col, y=row) axes), holes clockwise (negative).
"""

from __future__ import annotations

import numpy as np
import shapely
from scipy import ndimage

from roofstock.errors import ValidationError
from roofstock.geocore.vector import Polygon, Ring, ring_area
from roofstock.footprints.segmenter import InstanceMask

Vertex = tuple[int, int]  # (x, y) on the pixel-corner lattice


def connected_components(grid: np.ndarray) -> list[tuple[np.ndarray, tuple[int, int]]]:
    """Split a boolean grid into 4-connected components.

    Returns (cropped component grid, (row_offset, col_offset)) pairs in
    scan order of the component's top-left pixel.
    """
    labels, count = ndimage.label(grid)  # default structure = 4-connectivity
    components = []
    # find_objects returns one bounding box per label, in label order; a box
    # may overlap other components' pixels, so filter by the box's own label.
    for index, slices in enumerate(ndimage.find_objects(labels)):
        if slices is None:
            continue
        sl0, sl1 = slices
        components.append(((labels[sl0, sl1] == index + 1), (sl0.start, sl1.start)))
    components.sort(key=lambda item: item[1])
    return components


def _boundary_edges(grid: np.ndarray) -> dict[Vertex, list[Vertex]]:
    """Directed crack edges keeping foreground on the left of travel."""
    edges: dict[Vertex, list[Vertex]] = {}
    h, w = grid.shape
    padded = np.zeros((h + 2, w + 2), dtype=bool)
    padded[1:-1, 1:-1] = grid
    rows, cols = np.nonzero(grid)
    for r, c in zip(rows.tolist(), cols.tolist()):
        pr, pc = r + 1, c + 1
        if not padded[pr - 1, pc]:  # top: rightward
            edges.setdefault((c, r), []).append((c + 1, r))
        if not padded[pr, pc + 1]:  # right: downward
            edges.setdefault((c + 1, r), []).append((c + 1, r + 1))
        if not padded[pr + 1, pc]:  # bottom: leftward
            edges.setdefault((c + 1, r + 1), []).append((c, r + 1))
        if not padded[pr, pc - 1]:  # left: upward
            edges.setdefault((c, r + 1), []).append((c, r))
    return edges


def _left_exit(vertex: Vertex, source: Vertex, exits: list[Vertex]) -> Vertex:
    """At a 4-edge saddle vertex, turn left: hug the foreground pixel being walked.

    Diagonal foreground pixels are not 4-connected, so the contour must not
    cross between them here.
    """
    din = (vertex[0] - source[0], vertex[1] - source[1])
    for nxt in exits:
        dout = (nxt[0] - vertex[0], nxt[1] - vertex[1])
        if din[0] * dout[1] - din[1] * dout[0] > 0:
            return nxt
    return exits[0]


def _split_at_repeats(ring: list[Vertex]) -> list[list[Vertex]]:
    """Split a closed ring at repeated vertices until every ring is simple.

    A contour touching itself at a saddle vertex separates there into an
    exterior and the hole (or two holes) meeting at that corner.
    """
    core = ring[:-1]
    seen: dict[Vertex, int] = {}
    for j, v in enumerate(core):
        i = seen.get(v)
        if i is not None:
            inner = core[i:j] + [core[i]]
            outer = core[:i] + core[j:] + [core[0]]
            return _split_at_repeats(inner) + _split_at_repeats(outer)
        seen[v] = j
    return [ring]


def _merge_collinear(ring: list[Vertex]) -> list[Vertex]:
    # ring is closed (first == last); drop vertices interior to straight runs
    core = ring[:-1]
    n = len(core)
    out = []
    for i in range(n):
        prev, cur, nxt = core[i - 1], core[i], core[(i + 1) % n]
        v1 = (cur[0] - prev[0], cur[1] - prev[1])
        v2 = (nxt[0] - cur[0], nxt[1] - cur[1])
        if v1[0] * v2[1] - v1[1] * v2[0] != 0:
            out.append(cur)
    out.append(out[0])
    return out


def _trace_rings(grid: np.ndarray) -> list[Ring]:
    edges = _boundary_edges(grid)

    # Pair every incoming edge with its outgoing edge up front; the pairing
    # is bijective, so loops partition the edge set.
    incoming: dict[Vertex, list[Vertex]] = {}
    for start, ends in edges.items():
        for end in ends:
            incoming.setdefault(end, []).append(start)
    successor: dict[tuple[Vertex, Vertex], tuple[Vertex, Vertex]] = {}
    for vertex, sources in incoming.items():
        exits = edges.get(vertex, [])
        if not exits:
            raise AssertionError(f"open contour at vertex {vertex}")
        for source in sources:
            nxt = exits[0] if len(exits) == 1 else _left_exit(vertex, source, exits)
            successor[(source, vertex)] = (vertex, nxt)

    used: set[tuple[Vertex, Vertex]] = set()
    rings: list[Ring] = []
    for start in sorted(edges):
        for end in sorted(edges[start]):
            first = (start, end)
            if first in used:
                continue
            used.add(first)
            loop: list[Vertex] = [start, end]
            edge = successor[first]
            while edge != first:
                used.add(edge)
                loop.append(edge[1])
                edge = successor[edge]
            for simple in _split_at_repeats(loop):
                rings.append([(float(x), float(y)) for x, y in _merge_collinear(simple)])
    return rings


def _assemble_polygons(rings: list[Ring]) -> list[Polygon]:
    exteriors = [r for r in rings if ring_area(r) > 0]
    holes = [r for r in rings if ring_area(r) < 0]
    if not exteriors:
        raise AssertionError("component traced without an exterior ring")
    if len(exteriors) == 1:
        return [Polygon(exterior=exteriors[0], holes=tuple(holes))]

    # Defensive: should not happen for a 4-connected component, but if the
    # trace ever yields several exterior loops, attach each hole to the
    # loop containing it.
    shells = [shapely.Polygon(e) for e in exteriors]
    grouped: list[list[Ring]] = [[] for _ in exteriors]
    for hole in holes:
        probe = shapely.Polygon(hole).representative_point()
        for i, shell in enumerate(shells):
            if shell.contains(probe):
                grouped[i].append(hole)
                break
        else:
            raise AssertionError("hole ring not contained in any exterior")
    return [Polygon(exterior=e, holes=tuple(hs)) for e, hs in zip(exteriors, grouped)]


def mask_to_polygons(m: InstanceMask) -> list[Polygon]:
    """Vectorize one instance mask: one polygon per 4-connected component."""
    if not m.grid.any():
        raise ValidationError("mask has no foreground pixels")

    row0, col0 = m.offset
    polygons: list[Polygon] = []
    for grid, (r_off, c_off) in connected_components(m.grid):
        rings = _trace_rings(grid)
        dx, dy = float(col0 + c_off), float(row0 + r_off)
        shifted = [[(x + dx, y + dy) for x, y in ring] for ring in rings]
        polygons.extend(_assemble_polygons(shifted))
    return polygons
