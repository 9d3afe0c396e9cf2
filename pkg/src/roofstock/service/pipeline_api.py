"""Pipeline stage endpoints: each wraps one core operation over paths on disk."""

from __future__ import annotations

from pathlib import Path

from fastapi import APIRouter

from roofstock.geocore.geojson import read_footprints_file, write_footprints_file
from roofstock.geocore.raster import load_raster
from roofstock.dataset.manifest import DatasetManifest, ManifestRow, read_manifest, write_manifest
from roofstock.footprints.extract import segment_buildings
from roofstock.footprints.segmenter import SegmenterConfig, load_segmenter
from roofstock.classifier.train import TrainConfig, load_artifact, save_artifact, train_classifier
from roofstock.evaluation.cross_country import cross_country_matrix
from roofstock.evaluation.report import render_csv, render_markdown, emit_report
from roofstock.mapgen import classify_footprints, write_classification_map
from roofstock.tiling import bounding_rect, extract_tile, save_tile_png, scale_rect, tile_filename
from roofstock.service.models import (
    EvalCell,
    EvalRequest,
    EvalResponse,
    MapgenRequest,
    MapgenResponse,
    SegmentRequest,
    SegmentResponse,
    SplitRequest,
    SplitResponse,
    TileRequest,
    TileResponse,
    TrainRequest,
    TrainResponse,
)
from roofstock.dataset.split import stratified_split

router = APIRouter(prefix="/api/pipeline", tags=["pipeline"])


@router.post("/segment", response_model=SegmentResponse)
def run_segment(req: SegmentRequest) -> SegmentResponse:
    raster = load_raster(req.raster_path)
    segmenter = load_segmenter(req.backend)
    cfg = SegmenterConfig(
        text_prompt=req.text_prompt,
        box_threshold=req.box_threshold,
        text_threshold=req.text_threshold,
    )
    features = segment_buildings(
        raster, segmenter, cfg, min_area_m2=req.min_area_m2, simplify_tolerance=req.simplify_tolerance
    )
    out = write_footprints_file(features, req.out_path, crs=raster.crs)
    return SegmentResponse(
        out_path=str(out), raster_id=raster.raster_id, footprint_count=len(features), crs=raster.crs
    )


@router.post("/tile", response_model=TileResponse)
def run_tile(req: TileRequest) -> TileResponse:
    raster = load_raster(req.raster_path)
    features, report, crs = read_footprints_file(req.footprints_path)
    if crs != raster.crs:
        raise ValueError(f"footprints CRS {crs!r} does not match raster CRS {raster.crs!r}")

    rows = []
    skipped = 0
    for feature in sorted(features, key=lambda f: f.id):
        rect = scale_rect(bounding_rect(feature.polygon, raster), req.scale_factor)
        tile = extract_tile(raster, rect, feature.id)
        if tile.empty and not req.include_empty:
            skipped += 1
            continue
        save_tile_png(tile, req.out_dir, target=req.tile_size)
        rows.append(
            ManifestRow(
                tile_id=tile.tile_id,
                tile_path=tile_filename(tile),
                country=req.country,
                source=tile.source,
            )
        )
    manifest_path = write_manifest(DatasetManifest(rows=rows), req.manifest_path)
    return TileResponse(manifest_path=str(manifest_path), tile_count=len(rows), skipped_empty=skipped)


@router.post("/split", response_model=SplitResponse)
def run_split(req: SplitRequest) -> SplitResponse:
    manifest = read_manifest(req.manifest_path)
    result = stratified_split(manifest, req.task, test_frac=req.test_frac, seed=req.seed)
    out = write_manifest(result, req.out_path)
    return SplitResponse(
        out_path=str(out),
        train=len(result.rows_for_split("train")),
        test=len(result.rows_for_split("test")),
        test_per_class=result.class_counts(req.task, split="test"),
    )


@router.post("/train", response_model=TrainResponse)
def run_train(req: TrainRequest) -> TrainResponse:
    manifest = read_manifest(req.manifest_path)
    cfg = TrainConfig(
        task=req.task,
        backbone_id=req.backbone_id,
        input_size=req.input_size,
        batch_size=req.batch_size,
        max_epochs=req.max_epochs,
        initial_lr=req.initial_lr,
        plateau_patience=req.plateau_patience,
        plateau_factor=req.plateau_factor,
        label_smoothing=req.label_smoothing,
        monitor_frac=req.monitor_frac,
        seed=req.seed,
    )
    tiles_root = req.tiles_root or str(Path(req.manifest_path).parent)
    artifact = train_classifier(manifest, cfg, tiles_root=tiles_root)
    save_artifact(artifact, req.out_dir)
    history = artifact.history
    return TrainResponse(
        artifact_dir=req.out_dir,
        artifact_id=artifact.artifact_id,
        classes=artifact.classes,
        epochs_run=len(history),
        best_val_loss=min((h.val_loss for h in history), default=None),
        final_lr=history[-1].lr if history else None,
    )


@router.post("/eval", response_model=EvalResponse)
def run_eval(req: EvalRequest) -> EvalResponse:
    artifacts = {name: load_artifact(path) for name, path in req.artifacts.items()}
    test_rows = {}
    for name, path in req.test_manifests.items():
        manifest = read_manifest(path)
        rows = manifest.rows if req.split == "all" else manifest.rows_for_split(req.split)
        test_rows[name] = rows
    tiles_root = req.tiles_root or str(Path(next(iter(req.test_manifests.values()))).parent)
    cells = cross_country_matrix(artifacts, test_rows, req.task, tiles_root=tiles_root)
    emit_report(cells, req.out_dir)
    return EvalResponse(
        report_markdown=render_markdown(cells, req.task),
        report_csv=render_csv(cells, req.task),
        cells=[
            EvalCell(
                train_source=c.train_source,
                test_source=c.test_source,
                f1=c.metrics.f1,
                precision=c.metrics.precision,
                recall=c.metrics.recall,
                accuracy=c.metrics.accuracy,
                missing_classes=list(c.missing_classes),
                sample_count=c.sample_count,
            )
            for c in cells
        ],
    )


@router.post("/mapgen", response_model=MapgenResponse)
def run_mapgen(req: MapgenRequest) -> MapgenResponse:
    raster = load_raster(req.raster_path)
    features, report, crs = read_footprints_file(req.footprints_path)
    if crs != raster.crs:
        raise ValueError(f"footprints CRS {crs!r} does not match raster CRS {raster.crs!r}")
    artifact = load_artifact(req.artifact_dir)
    classified, skip_report = classify_footprints(raster, features, artifact, scale_factor=req.scale_factor)
    path = write_classification_map(classified, artifact.task, raster.raster_id, req.out_dir, crs=crs)
    counts: dict[str, int] = {}
    for item in classified:
        counts[item.label] = counts.get(item.label, 0) + 1
    return MapgenResponse(map_path=str(path), label_counts=counts, skipped=len(skip_report.empty_tiles))
