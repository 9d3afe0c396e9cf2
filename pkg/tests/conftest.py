import numpy as np
import pytest

from roofstock.geocore.raster import GeoRaster, RasterProvenance
from roofstock.geocore.transform import AffineGeoTransform


@pytest.fixture
def unit_raster():
    """8x10 gradient raster with a y-down unit transform in a metric CRS."""
    data = (np.arange(8 * 10 * 3, dtype=np.uint8).reshape(8, 10, 3) % 251) + 1
    return GeoRaster(
        raster_id="unit",
        data=data,
        transform=AffineGeoTransform(0.0, 0.0, 1.0, 1.0),
        crs="EPSG:32620",
        provenance=RasterProvenance(source="drone", year=2017, provider="test", resolution_cm_px=100.0),
    )


def random_transform(rng: np.random.Generator) -> AffineGeoTransform:
    return AffineGeoTransform(
        origin_x=float(rng.uniform(-1000, 1000)),
        origin_y=float(rng.uniform(-1000, 1000)),
        pixel_width=float(rng.uniform(0.05, 3.0)),
        pixel_height=-float(rng.uniform(0.05, 3.0)),
        row_rotation=float(rng.uniform(-0.02, 0.02)),
        col_rotation=float(rng.uniform(-0.02, 0.02)),
    )
