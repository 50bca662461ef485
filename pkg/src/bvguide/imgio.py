"""Raster decoding/encoding and the GMAP guide-map exchange format.

Images are plain numpy arrays throughout the package:

* RGB image -- ``(H, W, 3)`` ``uint8``, sRGB, row-major, top-left origin
* plane     -- ``(H, W)`` ``float32``, all values finite
* mask      -- ``(H, W)`` ``bool``

GMAP layout (all little-endian)::

    0   4s  magic "GMAP"
    4   u16 version (1)
    6   u16 reserved (0)
    8   u32 width
    12  u32 height
    16  f32[width * height] row-major values
"""
from __future__ import annotations

import os
import struct
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import (
    BadMagic,
    BadVersion,
    CorruptImage,
    DimensionMismatch,
    RangeError,
    TruncatedFile,
    UnsupportedFormat,
)

GMAP_MAGIC = b"GMAP"
GMAP_VERSION = 1
_GMAP_HEADER = struct.Struct("<4sHHII")

_RASTER_FORMATS = {"PNG", "TIFF"}


def as_rgb(img) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3 or img.dtype != np.uint8:
        raise ValueError(f"expected (H, W, 3) uint8 image, got {img.shape} {img.dtype}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError("image must be at least 1x1")
    return img


def as_plane(plane) -> np.ndarray:
    plane = np.asarray(plane)
    if plane.ndim != 2 or plane.shape[0] < 1 or plane.shape[1] < 1:
        raise ValueError(f"expected non-empty 2-D plane, got shape {plane.shape}")
    if not np.issubdtype(plane.dtype, np.floating):
        plane = plane.astype(np.float32)
    if not np.all(np.isfinite(plane)):
        raise RangeError("plane contains NaN or Inf")
    return plane


def round_half_away(x: np.ndarray) -> np.ndarray:
    """Round half away from zero (``numpy.round`` rounds half to even)."""
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def _open(path) -> Image.Image:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(str(path))
    try:
        im = Image.open(path)
    except UnidentifiedImageError as exc:
        raise CorruptImage(f"{path}: cannot identify image") from exc
    if im.format not in _RASTER_FORMATS:
        raise UnsupportedFormat(f"{path}: {im.format} is not PNG or TIFF")
    if getattr(im, "n_frames", 1) > 1:
        raise UnsupportedFormat(f"{path}: multi-page images are not supported")
    try:
        im.load()
    except (OSError, SyntaxError, ValueError) as exc:
        raise CorruptImage(f"{path}: {exc}") from exc
    return im


def load_rgb8(path) -> np.ndarray:
    """Decode an 8-bit PNG/TIFF into an ``(H, W, 3)`` uint8 array.

    Alpha is dropped and grayscale is replicated to three channels. Palette,
    CMYK, bilevel and 16-bit inputs raise :class:`UnsupportedFormat`.
    """
    im = _open(path)
    mode = im.mode
    if mode == "RGB":
        arr = np.asarray(im)
    elif mode == "RGBA":
        arr = np.asarray(im)[:, :, :3]
    elif mode in ("L", "LA"):
        gray = np.asarray(im)
        if gray.ndim == 3:
            gray = gray[:, :, 0]
        arr = np.repeat(gray[:, :, None], 3, axis=2)
    else:
        raise UnsupportedFormat(f"{path}: unsupported pixel mode {mode!r}")
    return np.ascontiguousarray(arr, dtype=np.uint8)


def save_rgb8(img, path) -> None:
    Image.fromarray(as_rgb(img)).save(path, format="PNG")


def quantize16(plane) -> np.ndarray:
    plane = as_plane(plane)
    if plane.min() < 0.0 or plane.max() > 1.0:
        raise RangeError("plane values must lie in [0, 1]")
    return round_half_away(plane.astype(np.float64) * 65535.0).astype(np.uint16)


def save_png_gray16(plane, path) -> None:
    """Write a [0, 1] plane as a 16-bit grayscale PNG, ``round(v * 65535)``."""
    q = quantize16(plane)
    Image.fromarray(q).save(path, format="PNG")


def load_gray(path) -> np.ndarray:
    """Read a grayscale PNG/TIFF as a float32 plane scaled to [0, 1].

    16-bit images are divided by 65535, 8-bit ones by 255.
    """
    im = _open(path)
    arr = np.asarray(im)
    if im.mode.startswith("I;16") or im.mode == "I":
        scale = 65535.0
    elif im.mode in ("L", "LA"):
        scale = 255.0
        if arr.ndim == 3:
            arr = arr[:, :, 0]
    elif im.mode == "1":
        scale = 1.0
    else:
        raise UnsupportedFormat(f"{path}: expected a grayscale image, got mode {im.mode!r}")
    return (arr.astype(np.float64) / scale).astype(np.float32)


def load_mask(path) -> np.ndarray:
    """Read a mask image; any nonzero pixel (in any color channel) is True."""
    im = _open(path)
    arr = np.asarray(im)
    if arr.ndim == 3:
        if im.mode in ("RGBA", "LA"):
            arr = arr[:, :, :-1]
        arr = arr.any(axis=2)
    return np.ascontiguousarray(arr != 0)


def save_mask(mask, path) -> None:
    mask = np.asarray(mask, dtype=bool)
    Image.fromarray(mask.astype(np.uint8) * 255).save(path, format="PNG")


def write_gmap(plane, path) -> None:
    plane = as_plane(plane)
    h, w = plane.shape
    header = _GMAP_HEADER.pack(GMAP_MAGIC, GMAP_VERSION, 0, w, h)
    payload = np.ascontiguousarray(plane, dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def read_gmap(path) -> np.ndarray:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 4 or raw[:4] != GMAP_MAGIC:
        raise BadMagic(f"{path}: not a GMAP file")
    if len(raw) < _GMAP_HEADER.size:
        raise TruncatedFile(f"{path}: header truncated")
    _, version, _, w, h = _GMAP_HEADER.unpack_from(raw)
    if version != GMAP_VERSION:
        raise BadVersion(f"{path}: unsupported GMAP version {version}")
    need = _GMAP_HEADER.size + 4 * w * h
    if len(raw) < need:
        raise TruncatedFile(f"{path}: expected {need} bytes, found {len(raw)}")
    data = np.frombuffer(raw, dtype="<f4", count=w * h, offset=_GMAP_HEADER.size)
    return data.reshape(h, w).astype(np.float32)


def save_rgba_guided(rgb, guide, path) -> None:
    """Preview of the 4-channel input: RGB plus ``round(guide * 255)`` as alpha."""
    rgb = as_rgb(rgb)
    guide = as_plane(guide)
    if rgb.shape[:2] != guide.shape:
        raise DimensionMismatch(f"rgb {rgb.shape[:2]} vs guide {guide.shape}")
    if guide.min() < 0.0 or guide.max() > 1.0:
        raise RangeError("guide values must lie in [0, 1]")
    alpha = round_half_away(guide.astype(np.float64) * 255.0).astype(np.uint8)
    rgba = np.dstack([rgb, alpha])
    Image.fromarray(rgba).save(path, format="PNG")


def load_plane(path) -> np.ndarray:
    """Load a map for evaluation: GMAP files verbatim, images via :func:`load_gray`."""
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == GMAP_MAGIC:
        return read_gmap(path)
    return load_gray(path)


def stem(path) -> str:
    return os.path.splitext(os.path.basename(os.fspath(path)))[0]
