"""FastAPI application factory.

The pipeline router is always available. Annotation endpoints need an
AnnotationStore (configured by `roofstock serve`); without one they return
503. When a built UI directory is given, it is served at the root.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import Depends, FastAPI, HTTPException, Query, Request
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from roofstock.errors import ConfigurationError, PipelineError, ValidationError
from roofstock.dataset.schema import TASKS, task_classes
from roofstock.service.annotation import AnnotationStore, LeaseConflict
from roofstock.service.models import (
    LabelRequest,
    LabelResponse,
    NextTileResponse,
    ProgressResponse,
    ReleaseRequest,
)
from roofstock.service.pipeline_api import router as pipeline_router


def _error_payload(kind: str, detail: str) -> dict:
    return {"detail": detail, "kind": kind}


def create_app(store: AnnotationStore | None = None, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="roofstock", version="0.1.0")
    app.state.store = store

    @app.exception_handler(ValidationError)
    async def _validation_error(request: Request, exc: ValidationError):
        return JSONResponse(status_code=422, content=_error_payload("validation", str(exc)))

    @app.exception_handler(ConfigurationError)
    async def _config_error(request: Request, exc: ConfigurationError):
        return JSONResponse(status_code=400, content=_error_payload("validation", str(exc)))

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content=_error_payload("validation", str(exc)))

    @app.exception_handler(LeaseConflict)
    async def _lease_conflict(request: Request, exc: LeaseConflict):
        return JSONResponse(status_code=409, content=_error_payload("lease", str(exc)))

    @app.exception_handler(FileNotFoundError)
    async def _not_found(request: Request, exc: FileNotFoundError):
        return JSONResponse(status_code=404, content=_error_payload("io", str(exc)))

    @app.exception_handler(KeyError)
    async def _key_error(request: Request, exc: KeyError):
        return JSONResponse(status_code=404, content=_error_payload("io", f"unknown id: {exc}"))

    @app.exception_handler(OSError)
    async def _os_error(request: Request, exc: OSError):
        return JSONResponse(status_code=500, content=_error_payload("io", str(exc)))

    @app.exception_handler(PipelineError)
    async def _pipeline_error(request: Request, exc: PipelineError):
        return JSONResponse(status_code=500, content=_error_payload("pipeline", str(exc)))

    app.include_router(pipeline_router)

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok", "annotation": store is not None}

    @app.get("/api/tasks")
    def tasks() -> dict:
        return {task: list(classes) for task, classes in TASKS.items()}

    def get_store() -> AnnotationStore:
        if store is None:
            raise HTTPException(
                status_code=503,
                detail="annotation service not configured; start with `roofstock serve --manifest ...`",
            )
        return store

    @app.get("/api/next", response_model=NextTileResponse)
    def next_tile(
        task: str = Query(...),
        annotator: str = Query(...),
        st: AnnotationStore = Depends(get_store),
    ) -> NextTileResponse:
        row, pending = st.lease_next(task, annotator)
        classes = list(task_classes(task))
        if row is None:
            return NextTileResponse(
                tile_id=None, image_url=None, task=task, classes=classes,
                done=pending == 0, pending=pending, lease_seconds=st.lease_seconds,
            )
        return NextTileResponse(
            tile_id=row.tile_id,
            image_url=f"/api/tile/{row.tile_id}.png",
            task=task,
            classes=classes,
            done=False,
            pending=pending,
            lease_seconds=st.lease_seconds,
        )

    @app.post("/api/label", response_model=LabelResponse)
    def submit_label(req: LabelRequest, st: AnnotationStore = Depends(get_store)) -> LabelResponse:
        entry = st.submit_label(req.tile_id, req.task, req.label, req.annotator)
        progress = st.progress(req.task)
        return LabelResponse(
            tile_id=req.tile_id,
            task=req.task,
            label=req.label,
            seq=entry["seq"],
            labeled=progress["labeled"],
            total=progress["total"],
        )

    @app.post("/api/release")
    def release(req: ReleaseRequest, st: AnnotationStore = Depends(get_store)) -> dict:
        st.release(req.tile_id, req.annotator)
        return {"released": req.tile_id}

    @app.get("/api/progress", response_model=ProgressResponse)
    def progress(task: str = Query(...), st: AnnotationStore = Depends(get_store)) -> ProgressResponse:
        return ProgressResponse(**st.progress(task))

    @app.get("/api/tile/{tile_id}.png")
    def tile_image(tile_id: str, st: AnnotationStore = Depends(get_store)) -> FileResponse:
        return FileResponse(st.tile_path(tile_id), media_type="image/png")

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
