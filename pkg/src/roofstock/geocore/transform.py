"""Affine mapping between pixel indices and world coordinates.

Follows the GDAL-style six-parameter convention:

    x = origin_x + col * pixel_width  + row * row_rotation
    y = origin_y + col * col_rotation + row * pixel_height

pixel_height is conventionally negative for north-up imagery.
"""

from __future__ import annotations

from dataclasses import dataclass

from roofstock.errors import ConfigurationError

# Determinants smaller than this are treated as singular.
_DET_EPS = 1e-30


@dataclass(frozen=True)
class AffineGeoTransform:
    origin_x: float
    origin_y: float
    pixel_width: float
    pixel_height: float
    row_rotation: float = 0.0
    col_rotation: float = 0.0

    @property
    def determinant(self) -> float:
        return self.pixel_width * self.pixel_height - self.row_rotation * self.col_rotation

    def validate(self) -> None:
        if abs(self.determinant) < _DET_EPS:
            raise ConfigurationError(
                f"singular geotransform: determinant {self.determinant!r} of the linear part is zero"
            )

    @classmethod
    def identity(cls) -> "AffineGeoTransform":
        """Unit north-up transform: origin (0, 0), 1 x -1 pixels."""
        return cls(0.0, 0.0, 1.0, -1.0)


def pixel_to_world(t: AffineGeoTransform, row: float, col: float) -> tuple[float, float]:
    """Map a (row, col) pixel position to world (x, y)."""
    x = t.origin_x + col * t.pixel_width + row * t.row_rotation
    y = t.origin_y + col * t.col_rotation + row * t.pixel_height
    return x, y


def world_to_pixel(t: AffineGeoTransform, x: float, y: float) -> tuple[float, float]:
    """Map world (x, y) to fractional (row, col); inverse of pixel_to_world."""
    t.validate()
    dx = x - t.origin_x
    dy = y - t.origin_y
    det = t.determinant
    # Invert [[pixel_width, row_rotation], [col_rotation, pixel_height]] @ (col, row) = (dx, dy)
    col = (dx * t.pixel_height - dy * t.row_rotation) / det
    row = (dy * t.pixel_width - dx * t.col_rotation) / det
    return row, col
