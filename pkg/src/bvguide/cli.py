"""Command-line entry point: ``bvguide {guide,batch,eval,synth}``.

Exit codes: 0 success, 2 usage or input error, 3 partial batch failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import imgio
from .errors import GuideMapError, UnsupportedFormat
from .filters import GaussianSpec
from .metrics import binarize, confusion, dsc, iou, macro_average, micro_average
from .morphology import StructuringElement
from .pipeline import PipelineConfig, generate_guide_map
from .synth import PhantomSpec, generate_phantom
from .tiler import PadPolicy, TileSpec, run_batch

EXIT_OK, EXIT_INPUT, EXIT_PARTIAL = 0, 2, 3

IMAGE_SUFFIXES = {".png", ".tif", ".tiff"}

STAGE_FILES = (
    "01_blur.png",
    "02_heatmap.png",
    "03_luminosity.png",
    "04_opened.png",
    "05_closed.png",
    "06_brightness.png",
    "07_guide.png",
)


class UsageError(Exception):
    pass


def _pipeline_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("pipeline")
    g.add_argument("--blur-kernel", type=int, default=3, metavar="N", help="Gaussian kernel size (odd, default 3)")
    g.add_argument("--sigma", type=float, default=0.0, metavar="F", help="Gaussian sigma; 0 derives it from the kernel size")
    g.add_argument("--morph-kernel", type=int, default=3, metavar="N", help="square structuring element size (odd, default 3)")
    g.add_argument("--threshold-override", type=int, default=None, metavar="T", help="fixed A-channel threshold 0..255 instead of Otsu")
    g.add_argument("--png16", action="store_true", help="also write 16-bit PNG previews of the guide")
    g.add_argument("--rgba", action="store_true", help="also write RGBA previews (guide as alpha)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bvguide", description="Blood-vessel guide maps for H&E images.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    pipe = _pipeline_parent()

    g = sub.add_parser("guide", parents=[pipe], help="guide map for one image")
    g.add_argument("input")
    g.add_argument("-o", "--out", default=".", help="output directory")
    g.add_argument("--dump-stages", metavar="DIR", help="write every intermediate stage as PNG")

    b = sub.add_parser("batch", parents=[pipe], help="tile and process every image in a directory")
    b.add_argument("dir")
    b.add_argument("-o", "--out", default="out", help="output directory")
    b.add_argument("--tile", type=int, default=512, metavar="N")
    b.add_argument("--stride", type=int, default=None, metavar="N", help="default: equal to --tile")
    b.add_argument("--pad-policy", choices=[p.value for p in PadPolicy], default=PadPolicy.REFLECT_PAD.value)
    b.add_argument("--jobs", type=int, default=1, metavar="N")

    e = sub.add_parser("eval", help="DSC/IoU of a map or mask against ground truth")
    e.add_argument("--pred", required=True, help="GMAP, PNG map or mask, or a directory of them")
    e.add_argument("--truth", required=True, help="mask image or directory; nonzero = vessel")
    mode = e.add_mutually_exclusive_group()
    mode.add_argument("--threshold", type=float, default=0.5)
    mode.add_argument("--sweep", metavar="A:B:STEP")

    s = sub.add_parser("synth", help="write a synthetic phantom and its mask")
    s.add_argument("-o", "--out", default=".", help="output directory")
    s.add_argument("--seed", type=int, default=0, metavar="N")
    s.add_argument("--blobs", type=int, default=PhantomSpec.n_blobs, metavar="N")
    s.add_argument("--width", type=int, default=PhantomSpec.width)
    s.add_argument("--height", type=int, default=PhantomSpec.height)
    s.add_argument("--noise", type=float, default=PhantomSpec.noise_sigma, metavar="SIGMA")
    s.add_argument("--radius-min", type=int, default=PhantomSpec.blob_radius_range[0])
    s.add_argument("--radius-max", type=int, default=PhantomSpec.blob_radius_range[1])
    return parser


def pipeline_config(args, emit_stages: bool = False) -> PipelineConfig:
    try:
        return PipelineConfig(
            blur=GaussianSpec(args.blur_kernel, args.sigma),
            morph=StructuringElement(args.morph_kernel),
            threshold_override=args.threshold_override,
            emit_stages=emit_stages,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def parse_sweep(text: str) -> np.ndarray:
    try:
        a, b, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"--sweep expects A:B:STEP, got {text!r}") from None
    if step <= 0 or b < a:
        raise UsageError("--sweep needs STEP > 0 and B >= A")
    n = int(np.floor((b - a) / step + 1e-9)) + 1
    return np.round(a + step * np.arange(n), 10)


def _stage_png(plane: np.ndarray, path: Path) -> None:
    # zero stays zero so the dump can be checked for support
    peak = float(plane.max())
    imgio.save_png_gray16(plane / peak if peak > 0 else np.zeros_like(plane), path)


def dump_stages(stages, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    imgio.save_rgb8(stages.x_rgb_blurred, out / STAGE_FILES[0])
    planes = (
        stages.x_a_prime,
        stages.x_a_dprime_pre_morph,
        stages.x_a_opened,
        stages.x_a_dprime,
        stages.x_a_tprime,
    )
    for name, plane in zip(STAGE_FILES[1:6], planes):
        _stage_png(plane, out / name)
    imgio.save_png_gray16(stages.guide, out / STAGE_FILES[6])


def cmd_guide(args) -> int:
    cfg = pipeline_config(args, emit_stages=True)
    img = imgio.load_rgb8(args.input)
    guide, stages = generate_guide_map(img, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = imgio.stem(args.input)
    imgio.write_gmap(guide, out / f"{stem}.gmap")
    if args.png16:
        imgio.save_png_gray16(guide, out / f"{stem}_guide16.png")
    if args.rgba:
        imgio.save_rgba_guided(img, guide, out / f"{stem}_rgba.png")
    if args.dump_stages:
        dump_stages(stages, Path(args.dump_stages))
    print(f"t={stages.t} min={guide.min():.4f} max={guide.max():.4f}")
    return EXIT_OK


def cmd_batch(args) -> int:
    src = Path(args.dir)
    if not src.is_dir():
        raise UsageError(f"{src} is not a directory")
    inputs = sorted(p for p in src.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    if not inputs:
        raise UsageError(f"no PNG/TIFF images in {src}")
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    try:
        spec = TileSpec(args.tile, args.stride or args.tile, args.pad_policy)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    summary = run_batch(inputs, spec, pipeline_config(args), args.out, args.jobs, args.png16, args.rgba)
    for where, msg in summary.errors:
        print(f"error: {where}: {msg}", file=sys.stderr)
    print(f"tiles={summary.tiles_processed} failures={summary.failures} wall={summary.wall_time:.4f}")
    return EXIT_OK if summary.failures == 0 else EXIT_PARTIAL


def _load_pred(path: Path) -> np.ndarray:
    try:
        return imgio.load_plane(path)
    except UnsupportedFormat:
        return imgio.load_mask(path).astype(np.float32)


def _pair_dirs(pred_dir: Path, truth_dir: Path) -> list[tuple[Path, Path]]:
    truths = {}
    for p in sorted(truth_dir.iterdir()):
        if p.suffix.lower() in IMAGE_SUFFIXES:
            key = p.stem[: -len("_mask")] if p.stem.endswith("_mask") else p.stem
            truths[key] = p
    pairs = []
    for p in sorted(pred_dir.iterdir()):
        if p.suffix.lower() in IMAGE_SUFFIXES | {".gmap"} and p.stem in truths:
            pairs.append((p, truths[p.stem]))
    if not pairs:
        raise UsageError(f"no prediction in {pred_dir} matches a mask in {truth_dir}")
    return pairs


def cmd_eval(args) -> int:
    pred, truth = Path(args.pred), Path(args.truth)
    thresholds = parse_sweep(args.sweep) if args.sweep else np.array([args.threshold])
    if pred.is_dir() != truth.is_dir():
        raise UsageError("--pred and --truth must both be files or both be directories")
    pairs = _pair_dirs(pred, truth) if pred.is_dir() else [(pred, truth)]
    loaded = [(_load_pred(p), imgio.load_mask(t)) for p, t in pairs]

    for thr in thresholds:
        counts = [confusion(binarize(plane, thr), mask) for plane, mask in loaded]
        prefix = f"threshold={thr:.4f} " if args.sweep else ""
        if pred.is_dir():
            micro = micro_average(counts)
            mdsc, miou = macro_average(counts)
            print(f"{prefix}micro_dsc={micro.dsc:.4f} micro_iou={micro.iou:.4f} macro_dsc={mdsc:.4f} macro_iou={miou:.4f}")
        else:
            print(f"{prefix}dsc={dsc(counts[0]):.4f} iou={iou(counts[0]):.4f}")
    return EXIT_OK


def cmd_synth(args) -> int:
    try:
        spec = PhantomSpec(
            width=args.width,
            height=args.height,
            n_blobs=args.blobs,
            blob_radius_range=(args.radius_min, args.radius_max),
            noise_sigma=args.noise,
            seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rgb, mask = generate_phantom(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    imgio.save_rgb8(rgb, out / "phantom.png")
    imgio.save_mask(mask, out / "mask.png")
    return EXIT_OK


COMMANDS = {"guide": cmd_guide, "batch": cmd_batch, "eval": cmd_eval, "synth": cmd_synth}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, GuideMapError, ValueError) as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
