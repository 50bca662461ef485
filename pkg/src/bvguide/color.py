"""sRGB -> CIELAB / HSV conversion and channel extraction.

LAB uses the 8-bit offset convention: ``l = L* * 255/100``, ``a = a* + 128``,
``b = b* + 128``, each clamped to [0, 255]. Illuminant is D65 (2 deg).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChannelMismatch
from .imgio import as_rgb

# linear sRGB -> XYZ, D65
SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
D65_WHITE = (0.95047, 1.0, 1.08883)

_EPSILON = 0.008856  # (6/29)**3
_KAPPA_SLOPE = 7.787


@dataclass(frozen=True)
class LabImage:
    l: np.ndarray
    a: np.ndarray
    b: np.ndarray

    @property
    def shape(self):
        return self.l.shape


@dataclass(frozen=True)
class HsvImage:
    h: np.ndarray
    s: np.ndarray
    v: np.ndarray

    @property
    def shape(self):
        return self.h.shape


def srgb_to_linear(c: np.ndarray) -> np.ndarray:
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def _lab_f(t: np.ndarray) -> np.ndarray:
    return np.where(t > _EPSILON, np.cbrt(t), _KAPPA_SLOPE * t + 16.0 / 116.0)


def rgb_to_lab_float(img) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unscaled CIE ``(L*, a*, b*)`` as float64 planes."""
    rgb = as_rgb(img).astype(np.float64) / 255.0
    xyz = srgb_to_linear(rgb) @ SRGB_TO_XYZ.T
    fx = _lab_f(xyz[..., 0] / D65_WHITE[0])
    fy = _lab_f(xyz[..., 1] / D65_WHITE[1])
    fz = _lab_f(xyz[..., 2] / D65_WHITE[2])
    a = 500.0 * (fx - fy)
    b = 200.0 * (fy - fz)
    # The matrix rows and white point agree only to ~1e-7, which would leave
    # gray pixels a hair below a*=0 and split them across histogram bins.
    gray = (rgb[..., 0] == rgb[..., 1]) & (rgb[..., 1] == rgb[..., 2])
    a[gray] = 0.0
    b[gray] = 0.0
    return 116.0 * fy - 16.0, a, b


def rgb_to_lab(img) -> LabImage:
    L, a, b = rgb_to_lab_float(img)
    return LabImage(
        l=np.clip(L * (255.0 / 100.0), 0.0, 255.0).astype(np.float32),
        a=np.clip(a + 128.0, 0.0, 255.0).astype(np.float32),
        b=np.clip(b + 128.0, 0.0, 255.0).astype(np.float32),
    )


def rgb_to_hsv(img) -> HsvImage:
    """Hexcone HSV. Hue in degrees [0, 360); achromatic pixels get hue 0."""
    rgb = as_rgb(img).astype(np.float64) / 255.0
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    v = rgb.max(axis=2)
    mn = rgb.min(axis=2)
    delta = v - mn
    s = np.divide(delta, v, out=np.zeros_like(v), where=v > 0)

    safe = np.where(delta > 0, delta, 1.0)
    h = np.where(
        v == r,
        60.0 * ((g - b) / safe),
        np.where(v == g, 60.0 * ((b - r) / safe + 2.0), 60.0 * ((r - g) / safe + 4.0)),
    )
    h = np.where(delta > 0, np.mod(h, 360.0), 0.0)
    h = np.where(h >= 360.0, 0.0, h)
    return HsvImage(h=h.astype(np.float32), s=s.astype(np.float32), v=v.astype(np.float32))


_CHANNELS = {
    LabImage: {"L": "l", "A": "a", "B": "b"},
    HsvImage: {"H": "h", "S": "s", "V": "v"},
}


def extract_channel(img: LabImage | HsvImage, channel: str) -> np.ndarray:
    names = _CHANNELS.get(type(img))
    if names is None:
        raise TypeError(f"expected LabImage or HsvImage, got {type(img).__name__}")
    key = channel.upper()
    if key not in names:
        raise ChannelMismatch(f"channel {channel!r} not in {type(img).__name__}")
    return getattr(img, names[key]).copy()
