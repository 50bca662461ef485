import math

import numpy as np
import pytest

from bvguide.errors import PlacementFailure
from bvguide.metrics import binarize, evaluate
from bvguide.pipeline import generate_guide_map
from bvguide.synth import PhantomSpec, ellipse_mask, generate_phantom


def test_no_blobs_uniform():
    rgb, mask = generate_phantom(PhantomSpec(width=40, height=30, n_blobs=0, noise_sigma=0))
    assert rgb.shape == (30, 40, 3) and mask.shape == (30, 40)
    assert not mask.any()
    assert np.all(rgb == np.array([235, 200, 220], np.uint8))


def test_single_disc_area():
    spec = PhantomSpec(width=64, height=64, n_blobs=1, blob_radius_range=(10, 10), noise_sigma=0, seed=11)
    rgb, mask = generate_phantom(spec)
    area = mask.sum()
    assert math.pi * 100 * 0.9 <= area <= math.pi * 100 * 1.1
    assert np.all(rgb[mask] == np.array([180, 30, 40], np.uint8))
    assert np.all(rgb[~mask] == np.array([235, 200, 220], np.uint8))


def test_rasterized_disc_by_counting():
    m = ellipse_mask((41, 41), 20, 20, 10, 10)
    count = sum(1 for y in range(41) for x in range(41) if (x - 20) ** 2 + (y - 20) ** 2 <= 100)
    assert m.sum() == count == 317


def test_seed_determinism():
    spec = PhantomSpec(width=128, height=96, n_blobs=3, blob_radius_range=(5, 15), seed=5, noise_sigma=7)
    a = generate_phantom(spec)
    b = generate_phantom(spec)
    assert a[0].tobytes() == b[0].tobytes() and a[1].tobytes() == b[1].tobytes()
    c = generate_phantom(PhantomSpec(width=128, height=96, n_blobs=3, blob_radius_range=(5, 15), seed=6, noise_sigma=7))
    assert c[0].tobytes() != a[0].tobytes()


def test_blobs_do_not_touch():
    from scipy import ndimage as ndi

    spec = PhantomSpec(width=200, height=200, n_blobs=8, blob_radius_range=(6, 20), seed=2)
    _, mask = generate_phantom(spec)
    _, n = ndi.label(mask)
    assert n == 8


def test_placement_failure():
    with pytest.raises(PlacementFailure):
        generate_phantom(PhantomSpec(width=25, height=25, n_blobs=5, blob_radius_range=(10, 12)))


@pytest.mark.parametrize(
    "kw",
    [
        dict(blob_radius_range=(0, 3)),
        dict(blob_radius_range=(5, 3)),
        dict(width=20, height=20, blob_radius_range=(5, 10)),
        dict(noise_sigma=-1),
        dict(blob_color=(300, 0, 0)),
    ],
)
def test_invalid_spec(kw):
    with pytest.raises(ValueError):
        PhantomSpec(**kw)


@pytest.mark.parametrize("sigma", [0.0, 10.0])
def test_oracle_separation(sigma):
    rgb, mask = generate_phantom(PhantomSpec(seed=4, noise_sigma=sigma))
    guide, _ = generate_guide_map(rgb)
    assert guide[mask].mean() - guide[~mask].mean() >= 0.5
    assert evaluate(binarize(guide, 0.5), mask).dsc >= 0.90
