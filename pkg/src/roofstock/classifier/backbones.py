"""Backbone provider: pretrained feature extractors behind one interface.

The training loop never downloads weights itself; it asks a provider for
(model, input_size, normalization). The `tiny_test` backbone is a small
from-scratch CNN so the full pipeline runs on CPU without any weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import torch
from torch import nn

from roofstock.errors import ConfigurationError

BACKBONE_IDS = ("resnet50", "vgg16", "inceptionv3", "efficientnet_b0", "tiny_test")

IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)


@dataclass(frozen=True)
class BackboneSpec:
    model: nn.Module
    input_size: int
    normalize_mean: tuple[float, ...]
    normalize_std: tuple[float, ...]


class BackboneProvider(Protocol):
    def build(self, backbone_id: str, num_classes: int, input_size: int | None = None) -> BackboneSpec:
        ...


class TinyTestNet(nn.Module):
    """Three conv blocks + global average pool; trained from scratch."""

    def __init__(self, num_classes: int):
        super().__init__()
        self.features = nn.Sequential(
            nn.Conv2d(3, 16, kernel_size=3, padding=1),
            nn.ReLU(inplace=True),
            nn.MaxPool2d(2),
            nn.Conv2d(16, 32, kernel_size=3, padding=1),
            nn.ReLU(inplace=True),
            nn.MaxPool2d(2),
            nn.Conv2d(32, 64, kernel_size=3, padding=1),
            nn.ReLU(inplace=True),
            nn.AdaptiveAvgPool2d(1),
        )
        self.head = nn.Linear(64, num_classes)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.head(self.features(x).flatten(1))


def _torchvision_backbone(backbone_id: str, num_classes: int) -> nn.Module:
    try:
        from torchvision import models
    except ImportError as exc:  # pragma: no cover
        raise ConfigurationError(f"backbone {backbone_id!r} needs torchvision installed") from exc

    try:
        if backbone_id == "resnet50":
            model = models.resnet50(weights=models.ResNet50_Weights.IMAGENET1K_V1)
            model.fc = nn.Linear(model.fc.in_features, num_classes)
        elif backbone_id == "vgg16":
            model = models.vgg16(weights=models.VGG16_Weights.IMAGENET1K_V1)
            model.classifier[-1] = nn.Linear(model.classifier[-1].in_features, num_classes)
        elif backbone_id == "inceptionv3":
            model = models.inception_v3(weights=models.Inception_V3_Weights.IMAGENET1K_V1, aux_logits=True)
            model.aux_logits = False
            model.AuxLogits = None
            model.fc = nn.Linear(model.fc.in_features, num_classes)
        elif backbone_id == "efficientnet_b0":
            model = models.efficientnet_b0(weights=models.EfficientNet_B0_Weights.IMAGENET1K_V1)
            model.classifier[-1] = nn.Linear(model.classifier[-1].in_features, num_classes)
        else:
            raise ConfigurationError(f"unknown backbone {backbone_id!r}; expected one of {BACKBONE_IDS}")
    except ConfigurationError:
        raise
    except Exception as exc:
        raise ConfigurationError(
            f"backbone {backbone_id!r} unavailable (pretrained weights could not be loaded): {exc}"
        ) from exc
    return model


class DefaultBackboneProvider:
    """tiny_test from scratch; the four full architectures via torchvision."""

    def build(self, backbone_id: str, num_classes: int, input_size: int | None = None) -> BackboneSpec:
        if backbone_id == "tiny_test":
            return BackboneSpec(
                model=TinyTestNet(num_classes),
                input_size=input_size or 64,
                normalize_mean=(0.5, 0.5, 0.5),
                normalize_std=(0.5, 0.5, 0.5),
            )
        if backbone_id not in BACKBONE_IDS:
            raise ConfigurationError(f"unknown backbone {backbone_id!r}; expected one of {BACKBONE_IDS}")
        default_size = 299 if backbone_id == "inceptionv3" else 224
        return BackboneSpec(
            model=_torchvision_backbone(backbone_id, num_classes),
            input_size=input_size or default_size,
            normalize_mean=IMAGENET_MEAN,
            normalize_std=IMAGENET_STD,
        )
