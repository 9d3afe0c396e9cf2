"""`roofstock` command line.

Thin client over the HTTP service: every subcommand builds one request and
sends it either to a running server (`--server URL`) or to an in-process
instance of the same app, so the service layer validates everything in
both modes. Exit codes: 0 success, 1 validation error, 2 I/O or runtime
error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from roofstock.config import PipelineConfig, load_config


def _client(server: str | None):
    import httpx

    if server:
        return httpx.Client(base_url=server, timeout=None)
    from fastapi.testclient import TestClient
    from roofstock.service.app import create_app

    return TestClient(create_app(), raise_server_exceptions=False)


def _call(ctx: click.Context, path: str, payload: dict) -> dict:
    server = ctx.obj.get("server")
    with _client(server) as client:
        response = client.post(path, json=payload)
    if response.status_code == 200:
        return response.json()
    try:
        body = response.json()
        detail = body.get("detail")
        kind = body.get("kind", "")
    except Exception:
        detail, kind = response.text, ""
    if isinstance(detail, list):  # pydantic request validation
        detail = "; ".join(f"{'.'.join(str(p) for p in e.get('loc', []))}: {e.get('msg')}" for e in detail)
        kind = "validation"
    click.echo(f"error: {detail}", err=True)
    sys.exit(1 if kind == "validation" or response.status_code in (400, 422) else 2)


def _cfg(ctx: click.Context) -> PipelineConfig:
    return ctx.obj["config"]


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None, help="JSON/YAML pipeline config.")
@click.option("--server", default=None, help="Base URL of a running roofstock service; default runs in-process.")
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.pass_context
def main(ctx: click.Context, config_path: str | None, server: str | None, seed: int | None):
    """Housing-stock mapping pipeline."""
    try:
        overrides = {"seed": seed} if seed is not None else None
        config = load_config(config_path, overrides)
    except Exception as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    ctx.obj = {"config": config, "server": server}


@main.command()
@click.argument("raster_path", type=click.Path())
@click.argument("out_path", type=click.Path())
@click.option("--prompt", default=None, help="Text prompt for the segmenter.")
@click.option("--box-threshold", type=float, default=None)
@click.option("--text-threshold", type=float, default=None)
@click.option("--backend", default=None, help="Segmenter backend name (default from config).")
@click.option("--min-area-m2", type=float, default=None)
@click.option("--simplify-tolerance", type=float, default=None, help="Douglas-Peucker tolerance in CRS units.")
@click.pass_context
def segment(ctx, raster_path, out_path, prompt, box_threshold, text_threshold, backend, min_area_m2,
            simplify_tolerance):
    """Delineate building footprints from a raster."""
    cfg = _cfg(ctx)
    result = _call(ctx, "/api/pipeline/segment", {
        "raster_path": raster_path,
        "out_path": out_path,
        "text_prompt": prompt if prompt is not None else cfg.segmenter.text_prompt,
        "box_threshold": box_threshold if box_threshold is not None else cfg.segmenter.box_threshold,
        "text_threshold": text_threshold if text_threshold is not None else cfg.segmenter.text_threshold,
        "backend": backend if backend is not None else cfg.segmenter.backend,
        "min_area_m2": min_area_m2 if min_area_m2 is not None else cfg.segmenter.min_area_m2,
        "simplify_tolerance": simplify_tolerance if simplify_tolerance is not None else cfg.simplify_tolerance,
    })
    click.echo(f"{result['footprint_count']} footprints -> {result['out_path']}")


@main.command()
@click.argument("raster_path", type=click.Path())
@click.argument("footprints_path", type=click.Path())
@click.argument("out_dir", type=click.Path())
@click.option("--manifest", "manifest_path", type=click.Path(), default=None,
              help="Manifest output path (default <out_dir>/manifest.jsonl).")
@click.option("--country", default="")
@click.option("--scale-factor", type=float, default=None)
@click.option("--tile-size", type=int, default=None)
@click.option("--include-empty", is_flag=True, default=False)
@click.pass_context
def tile(ctx, raster_path, footprints_path, out_dir, manifest_path, country, scale_factor, tile_size,
         include_empty):
    """Extract rooftop chips and start a manifest."""
    cfg = _cfg(ctx)
    result = _call(ctx, "/api/pipeline/tile", {
        "raster_path": raster_path,
        "footprints_path": footprints_path,
        "out_dir": out_dir,
        "manifest_path": manifest_path or str(Path(out_dir) / "manifest.jsonl"),
        "country": country,
        "scale_factor": scale_factor if scale_factor is not None else cfg.tiling.scale_factor,
        "tile_size": tile_size if tile_size is not None else cfg.tiling.tile_size,
        "include_empty": include_empty,
    })
    click.echo(f"{result['tile_count']} tiles ({result['skipped_empty']} empty skipped) -> {result['manifest_path']}")


@main.command()
@click.argument("manifest_path", type=click.Path())
@click.argument("out_path", type=click.Path())
@click.option("--task", required=True, type=click.Choice(["roof_type", "roof_material"]))
@click.option("--test-frac", type=float, default=None)
@click.pass_context
def split(ctx, manifest_path, out_path, task, test_frac):
    """Stratified train/test split (test drawn from drone rows only)."""
    cfg = _cfg(ctx)
    result = _call(ctx, "/api/pipeline/split", {
        "manifest_path": manifest_path,
        "out_path": out_path,
        "task": task,
        "test_frac": test_frac if test_frac is not None else cfg.split.test_frac,
        "seed": cfg.seed,
    })
    click.echo(f"train {result['train']} / test {result['test']} -> {result['out_path']}")
    click.echo(f"test per class: {json.dumps(result['test_per_class'])}")


@main.command()
@click.argument("manifest_path", type=click.Path())
@click.argument("out_dir", type=click.Path())
@click.option("--task", required=True, type=click.Choice(["roof_type", "roof_material"]))
@click.option("--tiles-root", type=click.Path(), default=None)
@click.option("--backbone", default=None)
@click.option("--input-size", type=int, default=None)
@click.option("--batch-size", type=int, default=None)
@click.option("--max-epochs", type=int, default=None)
@click.option("--initial-lr", type=float, default=None)
@click.pass_context
def train(ctx, manifest_path, out_dir, task, tiles_root, backbone, input_size, batch_size, max_epochs,
          initial_lr):
    """Fine-tune a roof classifier on the manifest's train split."""
    cfg = _cfg(ctx)
    t = cfg.train
    result = _call(ctx, "/api/pipeline/train", {
        "manifest_path": manifest_path,
        "tiles_root": tiles_root,
        "out_dir": out_dir,
        "task": task,
        "backbone_id": backbone if backbone is not None else t.backbone_id,
        "input_size": input_size if input_size is not None else t.input_size,
        "batch_size": batch_size if batch_size is not None else t.batch_size,
        "max_epochs": max_epochs if max_epochs is not None else t.max_epochs,
        "initial_lr": initial_lr if initial_lr is not None else t.initial_lr,
        "plateau_patience": t.plateau_patience,
        "plateau_factor": t.plateau_factor,
        "label_smoothing": t.label_smoothing,
        "monitor_frac": t.monitor_frac,
        "seed": cfg.seed,
    })
    click.echo(
        f"{result['artifact_id']}: {result['epochs_run']} epochs, classes {result['classes']} "
        f"-> {result['artifact_dir']}"
    )


@main.command("eval")
@click.option("--artifact", "artifacts", multiple=True, required=True,
              help="NAME=DIR, repeatable (e.g. --artifact Dominica=artifacts/dom).")
@click.option("--test-manifest", "test_manifests", multiple=True, required=True,
              help="NAME=PATH, repeatable.")
@click.option("--task", required=True, type=click.Choice(["roof_type", "roof_material"]))
@click.option("--tiles-root", type=click.Path(), default=None)
@click.option("--out-dir", type=click.Path(), required=True)
@click.option("--split", default="test", type=click.Choice(["test", "train", "all"]))
@click.pass_context
def eval_cmd(ctx, artifacts, test_manifests, task, tiles_root, out_dir, split):
    """Cross-source evaluation matrix; writes report_<task>.md / .csv."""
    def parse_pairs(pairs, option):
        out = {}
        for pair in pairs:
            if "=" not in pair:
                click.echo(f"error: {option} expects NAME=PATH, got {pair!r}", err=True)
                sys.exit(1)
            name, _, value = pair.partition("=")
            out[name] = value
        return out

    result = _call(ctx, "/api/pipeline/eval", {
        "artifacts": parse_pairs(artifacts, "--artifact"),
        "test_manifests": parse_pairs(test_manifests, "--test-manifest"),
        "task": task,
        "tiles_root": tiles_root,
        "out_dir": out_dir,
        "split": split,
    })
    click.echo(result["report_markdown"])


@main.command()
@click.argument("raster_path", type=click.Path())
@click.argument("footprints_path", type=click.Path())
@click.argument("artifact_dir", type=click.Path())
@click.argument("out_dir", type=click.Path())
@click.option("--scale-factor", type=float, default=None)
@click.pass_context
def mapgen(ctx, raster_path, footprints_path, artifact_dir, out_dir, scale_factor):
    """Classify footprints and write a GeoJSON classification map."""
    cfg = _cfg(ctx)
    result = _call(ctx, "/api/pipeline/mapgen", {
        "raster_path": raster_path,
        "footprints_path": footprints_path,
        "artifact_dir": artifact_dir,
        "out_dir": out_dir,
        "scale_factor": scale_factor if scale_factor is not None else cfg.tiling.scale_factor,
    })
    click.echo(f"{result['map_path']}: {json.dumps(result['label_counts'])} (skipped {result['skipped']})")


@main.command()
@click.option("--manifest", "manifest_path", type=click.Path(), required=True)
@click.option("--tiles-dir", type=click.Path(), required=True)
@click.option("--ui-dir", type=click.Path(), default=None, help="Built UI assets to serve at /.")
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
@click.pass_context
def serve(ctx, manifest_path, tiles_dir, ui_dir, host, port):
    """Run the annotation service (and pipeline API) as an HTTP server."""
    import uvicorn

    from roofstock.service.annotation import AnnotationStore
    from roofstock.service.app import create_app

    if not Path(manifest_path).exists():
        click.echo(f"error: manifest not found: {manifest_path}", err=True)
        sys.exit(2)
    store = AnnotationStore(manifest_path, tiles_dir)
    app = create_app(store=store, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
