"""Roof classifier fine-tuning: loss, LR schedule, training driver, prediction."""

from roofstock.classifier.loss import smoothed_cross_entropy, smoothed_target, SmoothedCrossEntropy
from roofstock.classifier.schedule import plateau_schedule, replay_plateau_lrs, PlateauTracker
from roofstock.classifier.backbones import BackboneProvider, DefaultBackboneProvider, TinyTestNet
from roofstock.classifier.train import (
    TrainConfig,
    EpochRecord,
    ModelArtifact,
    train_classifier,
    save_artifact,
    load_artifact,
)
from roofstock.classifier.predict import Prediction, predict

__all__ = [
    "smoothed_cross_entropy",
    "smoothed_target",
    "SmoothedCrossEntropy",
    "plateau_schedule",
    "replay_plateau_lrs",
    "PlateauTracker",
    "BackboneProvider",
    "DefaultBackboneProvider",
    "TinyTestNet",
    "TrainConfig",
    "EpochRecord",
    "ModelArtifact",
    "train_classifier",
    "save_artifact",
    "load_artifact",
    "Prediction",
    "predict",
]
