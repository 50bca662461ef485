"""Guide maps that emphasize blood vessels in H&E images.

The map is built from the red content (CIELAB A channel above an Otsu
threshold), weighted by lightness and HSV value, cleaned with grayscale
opening/closing and min-max normalized. It is meant to be stacked onto the
RGB image as a fourth input channel for segmentation networks.
"""
from .color import HsvImage, LabImage, extract_channel, rgb_to_hsv, rgb_to_lab
from .filters import GaussianSpec, gaussian_blur_rgb, gaussian_kernel
from .imgio import (
    load_rgb8,
    read_gmap,
    save_png_gray16,
    save_rgba_guided,
    write_gmap,
)
from .metrics import ConfusionCounts, MetricReport, binarize, confusion, dsc, iou, sweep
from .morphology import StructuringElement, closing, dilate, erode, opening
from .pipeline import (
    GuidedPatch,
    PipelineConfig,
    PipelineStages,
    assemble_guided,
    generate_guide_map,
    min_max_normalize,
    multiply_planes,
)
from .synth import PhantomSpec, generate_phantom
from .threshold import Histogram256, OtsuResult, histogram256, otsu_threshold, subtract_clamp
from .tiler import BatchSummary, PadPolicy, TileRecord, TileSpec, plan_tiles, run_batch, stitch

__version__ = "0.1.0"
