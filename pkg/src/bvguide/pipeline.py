"""End-to-end guide-map generation.

Steps, in order:

1. blur the 8-bit RGB input, convert the blurred image to LAB and HSV
2. Otsu threshold ``t`` on the A channel, heatmap ``max(A - t, 0)``
3. scale the heatmap by lightness ``L / 255``
4. grayscale opening then closing
5. scale by HSV value ``V``
6. min-max normalize to [0, 1]
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .color import HsvImage, LabImage, extract_channel, rgb_to_hsv, rgb_to_lab
from .errors import DegenerateHistogram, DimensionMismatch, RangeError
from .filters import GaussianSpec, gaussian_blur_rgb
from .imgio import as_plane, as_rgb
from .morphology import StructuringElement, closing, opening
from .threshold import histogram256, otsu_threshold, subtract_clamp

DEGENERATE_T = -1


@dataclass(frozen=True)
class PipelineConfig:
    blur: GaussianSpec = field(default_factory=GaussianSpec)
    morph: StructuringElement = field(default_factory=StructuringElement)
    threshold_override: Optional[int] = None
    emit_stages: bool = False
    # L and V scale conventions; any positive values give the same guide
    lightness_scale: float = 1.0 / 255.0
    value_scale: float = 1.0

    def __post_init__(self):
        t = self.threshold_override
        if t is not None and not (0 <= t <= 255):
            raise ValueError(f"threshold_override must be in [0, 255], got {t}")
        if self.lightness_scale <= 0 or self.value_scale <= 0:
            raise ValueError("scale conventions must be positive")


@dataclass
class PipelineStages:
    x_rgb_blurred: np.ndarray
    x_lab: LabImage
    x_hsv: HsvImage
    x_a: np.ndarray
    t: int
    x_a_prime: np.ndarray
    x_a_dprime_pre_morph: np.ndarray
    x_a_opened: np.ndarray
    x_a_dprime: np.ndarray
    x_a_tprime: np.ndarray
    guide: np.ndarray


@dataclass(frozen=True)
class GuidedPatch:
    rgb: np.ndarray
    guide: np.ndarray

    def to_array(self) -> np.ndarray:
        """``(H, W, 4)`` float32 stack with RGB scaled to [0, 1]."""
        return np.dstack([self.rgb.astype(np.float32) / 255.0, self.guide.astype(np.float32)])


def min_max_normalize(plane) -> np.ndarray:
    """Rescale to [0, 1]; a constant plane maps to all zeros."""
    plane = as_plane(plane)
    dtype = np.float64 if plane.dtype == np.float64 else np.float32
    x = plane.astype(np.float64)
    lo, hi = x.min(), x.max()
    if hi == lo:
        return np.zeros(plane.shape, dtype=dtype)
    out = (x - lo) / (hi - lo)
    # pin the endpoints against rounding in the division
    out[x == lo] = 0.0
    out[x == hi] = 1.0
    return out.astype(dtype)


def multiply_planes(a, b) -> np.ndarray:
    a, b = as_plane(a), as_plane(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    return a * b


def _f32(p):
    return np.asarray(p, dtype=np.float32)


def guide_from_channels(a, l, v, t: float, cfg: PipelineConfig = PipelineConfig()):
    """Steps 2-6 on precomputed A, L (both 0..255) and V (0..1) planes.

    Returns ``(heat, lum, opened, morphed, bright, guide)``. Intermediates are
    float64; ``guide`` is float32.
    """
    heat = subtract_clamp(as_plane(a).astype(np.float64), t)
    lum = multiply_planes(heat, as_plane(l).astype(np.float64) * cfg.lightness_scale)
    opened = opening(lum, cfg.morph)
    morphed = closing(opened, cfg.morph)
    bright = multiply_planes(morphed, as_plane(v).astype(np.float64) * cfg.value_scale)
    guide = min_max_normalize(bright).astype(np.float32)
    return heat, lum, opened, morphed, bright, guide


def generate_guide_map(img, cfg: PipelineConfig = PipelineConfig()):
    """Compute the guide map of an RGB image.

    Returns ``(guide, stages)``; ``stages`` is ``None`` unless
    ``cfg.emit_stages``. If the A-channel histogram has a single occupied bin,
    the guide is all zeros and ``t`` is reported as -1.
    """
    img = as_rgb(img)
    blurred = gaussian_blur_rgb(img, cfg.blur)
    lab = rgb_to_lab(blurred)
    hsv = rgb_to_hsv(blurred)
    x_a = extract_channel(lab, "A")

    if cfg.threshold_override is not None:
        t = int(cfg.threshold_override)
    else:
        try:
            t = otsu_threshold(histogram256(x_a)).threshold
        except DegenerateHistogram:
            t = DEGENERATE_T

    if t == DEGENERATE_T:
        zeros = np.zeros(x_a.shape, dtype=np.float32)
        heat = lum = opened = morphed = bright = zeros
        guide = zeros.copy()
    else:
        heat, lum, opened, morphed, bright, guide = guide_from_channels(x_a, lab.l, hsv.v, t, cfg)

    stages = None
    if cfg.emit_stages:
        stages = PipelineStages(
            x_rgb_blurred=blurred,
            x_lab=lab,
            x_hsv=hsv,
            x_a=x_a,
            t=t,
            x_a_prime=_f32(heat),
            x_a_dprime_pre_morph=_f32(lum),
            x_a_opened=_f32(opened),
            x_a_dprime=_f32(morphed),
            x_a_tprime=_f32(bright),
            guide=guide,
        )
    return guide, stages


def assemble_guided(img, guide) -> GuidedPatch:
    """Pair the original (unblurred) RGB image with its guide as channel 4."""
    img = as_rgb(img)
    guide = as_plane(guide)
    if img.shape[:2] != guide.shape:
        raise DimensionMismatch(f"rgb {img.shape[:2]} vs guide {guide.shape}")
    if guide.min() < 0.0 or guide.max() > 1.0:
        raise RangeError("guide values must lie in [0, 1]")
    return GuidedPatch(img, guide.astype(np.float32))
