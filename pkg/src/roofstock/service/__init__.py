"""FastAPI service wrapping the pipeline and the annotation workflow."""

from roofstock.service.app import create_app
from roofstock.service.annotation import AnnotationStore, LeaseConflict, replay_label_log

__all__ = ["create_app", "AnnotationStore", "LeaseConflict", "replay_label_log"]
