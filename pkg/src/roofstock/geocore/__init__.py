"""Georeferenced raster and vector primitives."""

from roofstock.geocore.transform import (
    AffineGeoTransform,
    pixel_to_world,
    world_to_pixel,
)
from roofstock.geocore.raster import (
    GeoRaster,
    RasterProvenance,
    read_window,
    load_raster,
    load_provenance,
    InMemoryRasterReader,
    ImageFileRasterReader,
)
from roofstock.geocore.vector import (
    Polygon,
    FootprintFeature,
    ring_area,
    polygon_area,
    polygon_centroid,
    world_area_m2,
    meters_per_unit,
)
from roofstock.geocore.geojson import (
    FootprintLoadReport,
    load_footprints,
    save_footprints,
    read_footprints_file,
    write_footprints_file,
)

__all__ = [
    "AffineGeoTransform",
    "pixel_to_world",
    "world_to_pixel",
    "GeoRaster",
    "RasterProvenance",
    "read_window",
    "load_raster",
    "load_provenance",
    "InMemoryRasterReader",
    "ImageFileRasterReader",
    "Polygon",
    "FootprintFeature",
    "ring_area",
    "polygon_area",
    "polygon_centroid",
    "world_area_m2",
    "meters_per_unit",
    "FootprintLoadReport",
    "load_footprints",
    "save_footprints",
    "read_footprints_file",
    "write_footprints_file",
]
