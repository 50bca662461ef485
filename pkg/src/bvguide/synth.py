"""Synthetic H&E-like phantoms with known vessel masks.

Red filled ellipses (erythrocyte-like) are placed without overlap on a pink
(eosin-like) background, then i.i.d. Gaussian noise is added per channel.
All randomness comes from ``numpy.random.default_rng(seed)`` (PCG64), drawn in
this order: for each blob, attempts of (rx, ry, cx, cy) until one fits; then
one ``(H, W, 3)`` standard-normal noise field if ``noise_sigma > 0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PlacementFailure
from .imgio import round_half_away

MAX_ATTEMPTS = 1000


@dataclass(frozen=True)
class PhantomSpec:
    width: int = 512
    height: int = 512
    n_blobs: int = 6
    blob_radius_range: tuple[int, int] = (12, 40)
    blob_color: tuple[int, int, int] = (180, 30, 40)
    background_color: tuple[int, int, int] = (235, 200, 220)
    noise_sigma: float = 5.0
    seed: int = 0
    # empty pixels kept between neighbouring blobs
    gap: int = 3

    def __post_init__(self):
        rmin, rmax = self.blob_radius_range
        if self.width < 1 or self.height < 1:
            raise ValueError("phantom must be at least 1x1")
        if self.n_blobs < 0:
            raise ValueError("n_blobs must be >= 0")
        if not 1 <= rmin <= rmax:
            raise ValueError(f"invalid radius range {self.blob_radius_range}")
        if self.n_blobs and 2 * rmax + 1 > min(self.width, self.height):
            raise ValueError("largest blob does not fit inside the image")
        for c in (*self.blob_color, *self.background_color):
            if not 0 <= c <= 255:
                raise ValueError("colors must be bytes")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")


def ellipse_mask(shape, cx: int, cy: int, rx: int, ry: int) -> np.ndarray:
    yy, xx = np.ogrid[: shape[0], : shape[1]]
    return ((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2 <= 1.0


def generate_phantom(spec: PhantomSpec = PhantomSpec()) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(rgb, mask)`` for ``spec``; pure function of the spec."""
    rng = np.random.default_rng(spec.seed)
    shape = (spec.height, spec.width)
    mask = np.zeros(shape, dtype=bool)
    # pixels within `gap` of an existing blob
    keepout = np.zeros(shape, dtype=bool)
    rmin, rmax = spec.blob_radius_range

    for i in range(spec.n_blobs):
        for _ in range(MAX_ATTEMPTS):
            rx, ry = (int(r) for r in rng.integers(rmin, rmax + 1, size=2))
            cx = int(rng.integers(rx, spec.width - rx))
            cy = int(rng.integers(ry, spec.height - ry))
            blob = ellipse_mask(shape, cx, cy, rx, ry)
            if not np.any(blob & keepout):
                mask |= blob
                keepout |= ellipse_mask(shape, cx, cy, rx + spec.gap, ry + spec.gap)
                break
        else:
            raise PlacementFailure(f"could not place blob {i + 1} of {spec.n_blobs} in {MAX_ATTEMPTS} attempts")

    img = np.empty(shape + (3,), dtype=np.float64)
    img[:] = spec.background_color
    img[mask] = spec.blob_color
    if spec.noise_sigma > 0:
        img += spec.noise_sigma * rng.standard_normal(img.shape)
    rgb = np.clip(round_half_away(img), 0, 255).astype(np.uint8)
    return rgb, mask
