"""Building delineation: prompted segmentation, vectorization, simplification."""

from roofstock.footprints.segmenter import (
    SegmenterConfig,
    InstanceMask,
    PromptedSegmenter,
    ThresholdStubSegmenter,
    load_segmenter,
)
from roofstock.footprints.simplify import simplify_polyline, simplify_ring, simplify_dp
from roofstock.footprints.vectorize import mask_to_polygons, connected_components
from roofstock.footprints.extract import segment_buildings
from roofstock.footprints.alignment import AlignmentReport, alignment_report

__all__ = [
    "SegmenterConfig",
    "InstanceMask",
    "PromptedSegmenter",
    "ThresholdStubSegmenter",
    "load_segmenter",
    "simplify_polyline",
    "simplify_ring",
    "simplify_dp",
    "mask_to_polygons",
    "connected_components",
    "segment_buildings",
    "AlignmentReport",
    "alignment_report",
]
