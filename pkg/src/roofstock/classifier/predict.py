"""Batched inference over rooftop tiles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from roofstock.errors import ValidationError
from roofstock.classifier.train import ModelArtifact, _to_batch


@dataclass(frozen=True)
class Prediction:
    tile_id: str
    probabilities: tuple[float, ...]  # over the artifact's class list
    label: str
    confidence: float


def predict(
    artifact: ModelArtifact,
    tiles: list[tuple[str, np.ndarray]],
    batch_size: int = 32,
) -> list[Prediction]:
    """One prediction per (tile_id, image); output order matches input order.

    Tiles must already be padded to the artifact's input size. Results are
    independent of the batch size.
    """
    size = artifact.input_size
    for tile_id, img in tiles:
        if img.shape[0] != size or img.shape[1] != size:
            raise ValidationError(
                f"tile {tile_id!r} has shape {img.shape[0]}x{img.shape[1]}, expected {size}x{size}"
            )

    model = artifact.model
    model.eval()
    out: list[Prediction] = []
    with torch.no_grad():
        for start in range(0, len(tiles), batch_size):
            chunk = tiles[start : start + batch_size]
            images = [img[:, :, None] if img.ndim == 2 else img for _, img in chunk]
            batch = _to_batch(images, artifact.normalize_mean, artifact.normalize_std)
            probs = torch.softmax(model(batch), dim=-1).numpy()
            for (tile_id, _), p in zip(chunk, probs):
                arg = int(p.argmax())
                out.append(
                    Prediction(
                        tile_id=tile_id,
                        probabilities=tuple(float(v) for v in p),
                        label=artifact.classes[arg],
                        confidence=float(p[arg]),
                    )
                )
    return out
