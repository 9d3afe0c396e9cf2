"""Label-smoothed cross-entropy.

The one-hot target is replaced by q_k = (1 - eps) * [k == true] + eps / K,
and the loss is -sum_k q_k * log softmax(logits)_k. With eps = 0 this is
plain cross-entropy; with uniform logits the loss is exactly ln K for any
eps. Gradient w.r.t. logits is softmax(logits) - q.
"""

from __future__ import annotations

import numpy as np
import torch

from roofstock.errors import ValidationError

DEFAULT_SMOOTHING = 0.1


def smoothed_target(num_classes: int, true_class: int, eps: float = DEFAULT_SMOOTHING) -> np.ndarray:
    if num_classes < 2:
        raise ValidationError(f"need at least 2 classes, got {num_classes}")
    if not (0.0 <= eps < 1.0):
        raise ValidationError(f"smoothing must be in [0, 1), got {eps}")
    if not (0 <= true_class < num_classes):
        raise ValidationError(f"true_class {true_class} out of range for {num_classes} classes")
    q = np.full(num_classes, eps / num_classes, dtype=np.float64)
    q[true_class] += 1.0 - eps
    return q


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max()
    return shifted - np.log(np.exp(shifted).sum())


def smoothed_cross_entropy(logits, true_class: int, eps: float = DEFAULT_SMOOTHING) -> float:
    logits = np.asarray(logits, dtype=np.float64)
    if logits.ndim != 1:
        raise ValidationError(f"expected a 1-D logit vector, got shape {logits.shape}")
    if not np.isfinite(logits).all():
        raise ValidationError("logits contain non-finite values")
    q = smoothed_target(logits.shape[0], true_class, eps)
    return float(-(q * _log_softmax(logits)).sum())


def smoothed_cross_entropy_grad(logits, true_class: int, eps: float = DEFAULT_SMOOTHING) -> np.ndarray:
    """Analytic gradient of the loss w.r.t. the logits: softmax - q."""
    logits = np.asarray(logits, dtype=np.float64)
    q = smoothed_target(logits.shape[0], true_class, eps)
    return np.exp(_log_softmax(logits)) - q


class SmoothedCrossEntropy(torch.nn.Module):
    """Batch-mean torch version of the same loss, used by the training loop."""

    def __init__(self, eps: float = DEFAULT_SMOOTHING):
        super().__init__()
        if not (0.0 <= eps < 1.0):
            raise ValidationError(f"smoothing must be in [0, 1), got {eps}")
        self.eps = eps

    def forward(self, logits: torch.Tensor, targets: torch.Tensor) -> torch.Tensor:
        if not torch.isfinite(logits).all():
            raise ValidationError("logits contain non-finite values")
        k = logits.shape[-1]
        log_probs = torch.log_softmax(logits, dim=-1)
        nll = -log_probs.gather(-1, targets.unsqueeze(-1)).squeeze(-1)
        uniform = -log_probs.mean(dim=-1)
        return ((1.0 - self.eps) * nll + self.eps * uniform).mean()
