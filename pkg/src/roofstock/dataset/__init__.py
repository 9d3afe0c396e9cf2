"""Label schema, manifests, splitting, balancing, augmentation."""

from roofstock.dataset.schema import (
    ROOF_TYPE_CLASSES,
    ROOF_MATERIAL_CLASSES,
    TASKS,
    task_classes,
    validate_label,
)
from roofstock.dataset.manifest import (
    ManifestRow,
    DatasetManifest,
    combine_manifests,
    read_manifest,
    write_manifest,
    manifest_to_csv,
)
from roofstock.dataset.split import stratified_split
from roofstock.dataset.balance import oversample
from roofstock.dataset.augment import (
    AugmentParams,
    draw_augmentation,
    apply_augmentation,
    augment,
    rng_for_sample,
)

__all__ = [
    "ROOF_TYPE_CLASSES",
    "ROOF_MATERIAL_CLASSES",
    "TASKS",
    "task_classes",
    "validate_label",
    "ManifestRow",
    "DatasetManifest",
    "combine_manifests",
    "read_manifest",
    "write_manifest",
    "manifest_to_csv",
    "stratified_split",
    "oversample",
    "AugmentParams",
    "draw_augmentation",
    "apply_augmentation",
    "augment",
    "rng_for_sample",
]
