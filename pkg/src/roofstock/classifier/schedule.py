"""Reduce-on-plateau learning-rate schedule.

The monitored value must strictly decrease (min-delta 0) to count as an
improvement. After `patience` consecutive non-improving epochs the rate is
multiplied by `factor` and the patience counter resets; the best value
seen so far is never reset.
"""

from __future__ import annotations

from typing import Sequence

from roofstock.errors import ConfigurationError

DEFAULT_PATIENCE = 7
DEFAULT_FACTOR = 0.1


class PlateauTracker:
    """Stateful form used inside the training loop."""

    def __init__(self, lr: float, patience: int = DEFAULT_PATIENCE, factor: float = DEFAULT_FACTOR):
        if patience < 1:
            raise ConfigurationError(f"patience must be >= 1, got {patience}")
        if not (0.0 < factor < 1.0):
            raise ConfigurationError(f"factor must be in (0, 1), got {factor}")
        self.lr = lr
        self.patience = patience
        self.factor = factor
        self.best: float | None = None
        self.bad_epochs = 0

    def step(self, monitored: float) -> float:
        """Record one epoch's monitored value; returns the lr to use next."""
        if self.best is None or monitored < self.best:
            self.best = monitored
            self.bad_epochs = 0
        else:
            self.bad_epochs += 1
            if self.bad_epochs >= self.patience:
                self.lr *= self.factor
                self.bad_epochs = 0
        return self.lr


def replay_plateau_lrs(
    history: Sequence[float],
    initial_lr: float,
    patience: int = DEFAULT_PATIENCE,
    factor: float = DEFAULT_FACTOR,
) -> list[float]:
    """The lr in effect after each epoch of a monitored-value history."""
    tracker = PlateauTracker(initial_lr, patience=patience, factor=factor)
    return [tracker.step(value) for value in history]


def plateau_schedule(
    history: Sequence[float],
    patience: int = DEFAULT_PATIENCE,
    factor: float = DEFAULT_FACTOR,
    lr: float = 1e-5,
) -> float:
    """New lr after the last epoch of `history`, given the lr in effect before it.

    Decay timing depends only on the monitored values, so the decision for
    the final epoch is replayed from the full history.
    """
    if not history:
        return lr
    tracker = PlateauTracker(lr, patience=patience, factor=factor)
    for value in history[:-1]:
        saved = tracker.lr
        tracker.step(value)
        tracker.lr = saved  # only the final epoch's decision may change the given lr
    return tracker.step(history[-1])
