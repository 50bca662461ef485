"""Tiling, parallel batch processing and stitching of guide maps.

Tiles are independent work units. Whatever the worker count, results are
collected and written in ``tile_id`` order, so output files are
byte-identical for any ``jobs >= 1``.
"""
from __future__ import annotations

import csv
import enum
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import imgio
from .errors import CoverageGap
from .pipeline import PipelineConfig, generate_guide_map

log = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.csv"
MANIFEST_HEADER = ["tile_id", "source", "x", "y", "w", "h", "t", "gmap_path"]


class PadPolicy(str, enum.Enum):
    REFLECT_PAD = "reflect"
    SKIP_PARTIAL = "skip"


@dataclass(frozen=True)
class TileSpec:
    tile: int = 512
    stride: int = 512
    pad_policy: PadPolicy = PadPolicy.REFLECT_PAD

    def __post_init__(self):
        if self.tile < 1:
            raise ValueError(f"tile must be >= 1, got {self.tile}")
        if not 1 <= self.stride <= self.tile:
            raise ValueError(f"stride must be in [1, tile], got {self.stride}")
        object.__setattr__(self, "pad_policy", PadPolicy(self.pad_policy))


@dataclass(frozen=True)
class TileRecord:
    tile_id: int
    x: int
    y: int
    w: int
    h: int
    source: str = ""


@dataclass
class BatchSummary:
    tiles_processed: int = 0
    failures: int = 0
    wall_time: float = 0.0
    errors: list[tuple[str, str]] = field(default_factory=list)


def _axis_starts(length: int, spec: TileSpec) -> list[int]:
    if spec.pad_policy is PadPolicy.SKIP_PARTIAL:
        if length < spec.tile:
            return []
        n = (length - spec.tile) // spec.stride + 1
    else:
        n = 1 if length <= spec.tile else math.ceil((length - spec.tile) / spec.stride) + 1
    return [i * spec.stride for i in range(n)]


def plan_tiles(width: int, height: int, spec: TileSpec = TileSpec(), source: str = "") -> list[TileRecord]:
    """Row-major tile grid.

    With reflect padding the last tile on each axis may extend past the image
    (the overhang is filled by mirroring); with skip-partial such tiles are
    dropped.
    """
    xs = _axis_starts(width, spec)
    ys = _axis_starts(height, spec)
    return [
        TileRecord(i, x, y, spec.tile, spec.tile, source)
        for i, (y, x) in enumerate((y, x) for y in ys for x in xs)
    ]


def pad_to_cover(img: np.ndarray, records: list[TileRecord]) -> np.ndarray:
    """Reflect-101 pad ``img`` on the bottom/right so every record fits."""
    if not records:
        return img
    h, w = img.shape[:2]
    pad_y = max(0, max(r.y + r.h for r in records) - h)
    pad_x = max(0, max(r.x + r.w for r in records) - w)
    if pad_x == 0 and pad_y == 0:
        return img
    pad = [(0, pad_y), (0, pad_x)] + [(0, 0)] * (img.ndim - 2)
    return np.pad(img, pad, mode="reflect")


def crop(padded: np.ndarray, rec: TileRecord) -> np.ndarray:
    return padded[rec.y : rec.y + rec.h, rec.x : rec.x + rec.w]


def stitch(records: list[TileRecord], planes: list[np.ndarray], width: int, height: int) -> np.ndarray:
    """Reassemble tile planes; overlaps are averaged, padding is discarded."""
    if len(records) != len(planes):
        raise ValueError("records and planes differ in length")
    acc = np.zeros((height, width), dtype=np.float64)
    hits = np.zeros((height, width), dtype=np.int64)
    for rec, plane in sorted(zip(records, planes), key=lambda rp: rp[0].tile_id):
        x1 = min(rec.x + rec.w, width)
        y1 = min(rec.y + rec.h, height)
        if x1 <= rec.x or y1 <= rec.y:
            continue
        acc[rec.y : y1, rec.x : x1] += plane[: y1 - rec.y, : x1 - rec.x]
        hits[rec.y : y1, rec.x : x1] += 1
    if np.any(hits == 0):
        ys, xs = np.nonzero(hits == 0)
        raise CoverageGap(f"{len(ys)} pixels uncovered, first at (x={xs[0]}, y={ys[0]})")
    return (acc / hits).astype(np.float32)


def _guide_tile(args):
    tile, cfg = args
    try:
        guide, stages = generate_guide_map(tile, replace(cfg, emit_stages=True))
        return guide, stages.t, None
    except Exception as exc:  # reported per tile, never aborts the batch
        return None, None, f"{type(exc).__name__}: {exc}"


def _map(fn, items, jobs: int):
    if jobs <= 1:
        return map(fn, items)
    pool = ProcessPoolExecutor(max_workers=jobs)
    try:
        return list(pool.map(fn, items, chunksize=1))
    finally:
        pool.shutdown()


def guide_large(img, spec: TileSpec = TileSpec(), cfg: PipelineConfig = PipelineConfig(), jobs: int = 1) -> np.ndarray:
    """Guide map of an arbitrarily large image, computed per tile and stitched."""
    img = imgio.as_rgb(img)
    h, w = img.shape[:2]
    records = plan_tiles(w, h, spec)
    padded = pad_to_cover(img, records)
    results = list(_map(_guide_tile, [(crop(padded, r), cfg) for r in records], jobs))
    for rec, (_, _, err) in zip(records, results):
        if err:
            raise RuntimeError(f"tile {rec.tile_id}: {err}")
    return stitch(records, [g for g, _, _ in results], w, h)


def run_batch(
    inputs,
    spec: TileSpec = TileSpec(),
    cfg: PipelineConfig = PipelineConfig(),
    out_dir=".",
    jobs: int = 1,
    png16: bool = False,
    rgba: bool = False,
) -> BatchSummary:
    """Tile every input, compute guide maps and write GMAP files + manifest.

    Files are named ``{stem}_{tile_id:06}.gmap``; ``tile_id`` restarts at 0
    for each source. Unreadable inputs and failing tiles are counted in the
    summary and skipped.
    """
    start = time.perf_counter()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = BatchSummary()
    rows = []

    for source in inputs:
        source = os.fspath(source)
        try:
            img = imgio.load_rgb8(source)
        except Exception as exc:
            log.warning("skipping %s: %s", source, exc)
            summary.failures += 1
            summary.errors.append((source, f"{type(exc).__name__}: {exc}"))
            continue
        h, w = img.shape[:2]
        records = plan_tiles(w, h, spec, source)
        padded = pad_to_cover(img, records)
        stem = imgio.stem(source)
        results = _map(_guide_tile, [(crop(padded, r), cfg) for r in records], jobs)
        for rec, (guide, t, err) in zip(records, results):
            name = f"{stem}_{rec.tile_id:06d}"
            if err is not None:
                summary.failures += 1
                summary.errors.append((f"{source}#{rec.tile_id}", err))
                continue
            imgio.write_gmap(guide, out_dir / f"{name}.gmap")
            if png16:
                imgio.save_png_gray16(guide, out_dir / f"{name}_guide16.png")
            if rgba:
                imgio.save_rgba_guided(crop(padded, rec), guide, out_dir / f"{name}_rgba.png")
            rows.append([rec.tile_id, source, rec.x, rec.y, rec.w, rec.h, t, f"{name}.gmap"])
            summary.tiles_processed += 1

    write_manifest(rows, out_dir / MANIFEST_NAME)
    summary.wall_time = time.perf_counter() - start
    return summary


def write_manifest(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MANIFEST_HEADER)
        writer.writerows(rows)


def read_manifest(path) -> list[dict[str, str]]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))
