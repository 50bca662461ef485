"""Otsu threshold selection on a 256-bin histogram and subtract-with-clamp."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateHistogram, RangeError
from .imgio import as_plane

_SLACK = 1e-6


@dataclass(frozen=True)
class Histogram256:
    counts: np.ndarray  # int64, length 256
    total: int

    def __post_init__(self):
        if self.counts.shape != (256,):
            raise ValueError("histogram must have 256 bins")
        if int(self.counts.sum()) != self.total:
            raise ValueError("histogram total does not match counts")

    @classmethod
    def from_counts(cls, counts) -> "Histogram256":
        counts = np.asarray(counts, dtype=np.int64)
        if np.any(counts < 0):
            raise ValueError("negative bin count")
        return cls(counts, int(counts.sum()))

    def merge(self, other: "Histogram256") -> "Histogram256":
        return Histogram256(self.counts + other.counts, self.total + other.total)


@dataclass(frozen=True)
class OtsuResult:
    threshold: int
    between_class_variance: float


def histogram256(plane) -> Histogram256:
    """Bin index ``floor(clamp(v, 0, 255))``; values beyond [0, 255] +/- 1e-6 raise."""
    plane = as_plane(plane)
    if plane.min() < -_SLACK or plane.max() > 255.0 + _SLACK:
        raise RangeError("plane values must lie in [0, 255]")
    bins = np.floor(np.clip(plane, 0.0, 255.0)).astype(np.int64)
    counts = np.bincount(bins.ravel(), minlength=256)
    return Histogram256(counts, int(plane.size))


def otsu_threshold(hist: Histogram256) -> OtsuResult:
    """Threshold maximizing ``w0 * w1 * (mu0 - mu1)**2``.

    Class 0 is bins ``<= t``, class 1 bins ``> t``. Splits with an empty
    class are skipped and ties go to the smallest ``t``.
    """
    counts = np.asarray(hist.counts, dtype=np.int64)
    total = int(hist.total)
    if total < 1:
        raise DegenerateHistogram("empty histogram")
    if np.count_nonzero(counts) < 2:
        raise DegenerateHistogram("all mass lies in one bin")

    levels = np.arange(256, dtype=np.int64)
    n0 = np.cumsum(counts)[:255]
    s0 = np.cumsum(counts * levels)[:255]
    n1 = total - n0
    s_total = int((counts * levels).sum())
    valid = (n0 > 0) & (n1 > 0)

    # w0*w1*(mu0-mu1)^2 == (N*S0 - S*n0)^2 / (N^2 * n0 * n1)
    n0f = n0.astype(np.float64)
    diff = total * s0.astype(np.float64) - s_total * n0f
    score = np.full(255, -1.0)
    score[valid] = diff[valid] ** 2 / (n0f[valid] * n1[valid].astype(np.float64))

    # Float rounding can reorder near-ties; settle the top candidates exactly.
    best = score.max()
    candidates = np.flatnonzero(score >= best * (1.0 - 1e-9))
    t = int(candidates[0])
    num_best = (total * int(s0[t]) - s_total * int(n0[t])) ** 2
    den_best = int(n0[t]) * int(n1[t])
    for c in candidates[1:]:
        c = int(c)
        num = (total * int(s0[c]) - s_total * int(n0[c])) ** 2
        den = int(n0[c]) * int(n1[c])
        if num * den_best > num_best * den:
            t, num_best, den_best = c, num, den
    return OtsuResult(t, num_best / (den_best * total * total))


def subtract_clamp(plane, t: float) -> np.ndarray:
    """``max(plane - t, 0)`` pointwise; float64 input stays float64."""
    plane = as_plane(plane)
    dtype = np.float64 if plane.dtype == np.float64 else np.float32
    plane = plane.astype(dtype, copy=False)
    return np.maximum(plane - dtype(t), dtype(0))
