"""Flat grayscale morphology with square structuring elements.

Borders replicate the edge pixel, which keeps opening anti-extensive and
closing extensive all the way to the image boundary.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage as ndi

from .imgio import as_plane


@dataclass(frozen=True)
class StructuringElement:
    size: int = 3
    shape: str = "square"

    def __post_init__(self):
        if not isinstance(self.size, (int, np.integer)) or self.size < 1 or self.size % 2 == 0:
            raise ValueError(f"structuring element size must be a positive odd integer, got {self.size!r}")
        if self.shape != "square":
            raise ValueError(f"only square structuring elements are supported, got {self.shape!r}")


def erode(plane, se: StructuringElement = StructuringElement()) -> np.ndarray:
    plane = as_plane(plane)
    return ndi.grey_erosion(plane, size=(se.size, se.size), mode="nearest")


def dilate(plane, se: StructuringElement = StructuringElement()) -> np.ndarray:
    plane = as_plane(plane)
    return ndi.grey_dilation(plane, size=(se.size, se.size), mode="nearest")


def opening(plane, se: StructuringElement = StructuringElement()) -> np.ndarray:
    """Erode then dilate; removes bright features smaller than ``se``."""
    return dilate(erode(plane, se), se)


def closing(plane, se: StructuringElement = StructuringElement()) -> np.ndarray:
    """Dilate then erode; fills dark holes smaller than ``se``."""
    return erode(dilate(plane, se), se)

