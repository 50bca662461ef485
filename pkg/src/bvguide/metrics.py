"""Dice and IoU for binary masks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .imgio import as_plane


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn)

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricReport:
    dsc: float
    iou: float
    counts: ConfusionCounts

    @classmethod
    def from_counts(cls, counts: ConfusionCounts) -> "MetricReport":
        return cls(dsc(counts), iou(counts), counts)


def confusion(pred, truth) -> ConfusionCounts:
    pred = np.asarray(pred, dtype=bool)
    truth = np.asarray(truth, dtype=bool)
    if pred.shape != truth.shape:
        raise DimensionMismatch(f"pred {pred.shape} vs truth {truth.shape}")
    tp = int(np.count_nonzero(pred & truth))
    fp = int(np.count_nonzero(pred & ~truth))
    fn = int(np.count_nonzero(~pred & truth))
    return ConfusionCounts(tp, fp, fn, int(pred.size) - tp - fp - fn)


def dsc(counts: ConfusionCounts) -> float:
    """``2TP / (2TP + FP + FN)``; 1.0 when both masks are empty."""
    denom = 2 * counts.tp + counts.fp + counts.fn
    return 1.0 if denom == 0 else 2 * counts.tp / denom


def iou(counts: ConfusionCounts) -> float:
    """``TP / (TP + FP + FN)``; 1.0 when both masks are empty."""
    denom = counts.tp + counts.fp + counts.fn
    return 1.0 if denom == 0 else counts.tp / denom


def binarize(plane, thr: float) -> np.ndarray:
    return as_plane(plane) > thr


def evaluate(pred, truth) -> MetricReport:
    return MetricReport.from_counts(confusion(pred, truth))


def sweep(plane, truth, thresholds) -> list[tuple[float, MetricReport]]:
    plane = as_plane(plane)
    truth = np.asarray(truth, dtype=bool)
    if plane.shape != truth.shape:
        raise DimensionMismatch(f"pred {plane.shape} vs truth {truth.shape}")
    return [(float(t), evaluate(binarize(plane, t), truth)) for t in thresholds]


def micro_average(counts: list[ConfusionCounts]) -> MetricReport:
    """Pool pixels over all samples, then score."""
    pooled = ConfusionCounts(0, 0, 0, 0)
    for c in counts:
        pooled = pooled + c
    return MetricReport.from_counts(pooled)


def macro_average(counts: list[ConfusionCounts]) -> tuple[float, float]:
    """Mean of per-sample ``(dsc, iou)``."""
    if not counts:
        raise ValueError("no samples")
    return (
        float(np.mean([dsc(c) for c in counts])),
        float(np.mean([iou(c) for c in counts])),
    )
