"""Separable Gaussian smoothing of 8-bit RGB images."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidKernelSize
from .imgio import as_rgb, round_half_away


@dataclass(frozen=True)
class GaussianSpec:
    kernel_size: int = 3
    sigma: float = 0.0  # 0 -> derived from kernel_size

    def __post_init__(self):
        k = self.kernel_size
        if not isinstance(k, (int, np.integer)) or k < 1 or k % 2 == 0:
            raise InvalidKernelSize(f"kernel size must be a positive odd integer, got {k!r}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")


def derived_sigma(kernel_size: int) -> float:
    return 0.3 * ((kernel_size - 1) * 0.5 - 1.0) + 0.8


def gaussian_kernel(spec: GaussianSpec) -> np.ndarray:
    """Normalized 1-D Gaussian taps.

    With ``sigma == 0`` a 3-tap kernel is the binomial ``[1/4, 1/2, 1/4]`` and
    larger kernels use :func:`derived_sigma`.
    """
    k = spec.kernel_size
    if k == 1:
        return np.ones(1)
    if spec.sigma == 0 and k == 3:
        return np.array([0.25, 0.5, 0.25])
    sigma = spec.sigma if spec.sigma > 0 else derived_sigma(k)
    i = np.arange(k) - (k - 1) // 2
    with np.errstate(divide="ignore", invalid="ignore", under="ignore"):
        # tiny sigma underflows to a delta kernel
        g = np.where(i == 0, 1.0, np.exp(-(i * i) / (2.0 * sigma * sigma)))
    return g / g.sum()


def _convolve_axis(x: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    r = len(kernel) // 2
    pad = [(0, 0)] * x.ndim
    pad[axis] = (r, r)
    # numpy "reflect" is reflect-101: the edge sample is not repeated
    xp = np.pad(x, pad, mode="reflect")
    n = x.shape[axis]
    out = np.zeros_like(x)
    for j, w in enumerate(kernel):
        out += w * np.take(xp, np.arange(j, j + n), axis=axis)
    return out


def gaussian_blur_rgb(img, spec: GaussianSpec = GaussianSpec()) -> np.ndarray:
    """Blur each channel horizontally then vertically, round back to uint8."""
    img = as_rgb(img)
    kernel = gaussian_kernel(spec)
    if len(kernel) == 1:
        return img.copy()
    x = img.astype(np.float64)
    x = _convolve_axis(x, kernel, axis=1)
    x = _convolve_axis(x, kernel, axis=0)
    return np.clip(round_half_away(x), 0, 255).astype(np.uint8)
