"""Precision / recall / F-measure for the positive (abuse) class."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def precision(self) -> float:
        d = self.tp + self.fp
        return self.tp / d if d else 0.0

    @property
    def recall(self) -> float:
        d = self.tp + self.fn
        return self.tp / d if d else 0.0

    @property
    def f_measure(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0


def confusion(labels, predictions) -> Confusion:
    labels = np.asarray(labels, dtype=bool)
    predictions = np.asarray(predictions, dtype=bool)
    if labels.shape != predictions.shape:
        raise ValueError(f"length mismatch: {labels.shape} vs {predictions.shape}")
    return Confusion(
        int(np.sum(labels & predictions)),
        int(np.sum(~labels & predictions)),
        int(np.sum(labels & ~predictions)),
        int(np.sum(~labels & ~predictions)),
    )


def metrics(labels, predictions) -> tuple[float, float, float]:
    """``(precision, recall, f_measure)``; empty denominators count as 0."""
    c = confusion(labels, predictions)
    return c.precision, c.recall, c.f_measure


def f_measure(labels, predictions) -> float:
    return confusion(labels, predictions).f_measure
