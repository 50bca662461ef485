import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bvguide.color import rgb_to_hsv, rgb_to_lab
from bvguide.errors import DimensionMismatch, RangeError
from bvguide.filters import gaussian_blur_rgb
from bvguide.morphology import StructuringElement
from bvguide.pipeline import (
    PipelineConfig,
    assemble_guided,
    generate_guide_map,
    guide_from_channels,
    min_max_normalize,
    multiply_planes,
)
from bvguide.synth import PhantomSpec, generate_phantom


def test_min_max_examples():
    out = min_max_normalize(np.array([[2, 4, 6]], dtype=np.float32))
    assert out.tolist() == [[0.0, 0.5, 1.0]]
    assert not min_max_normalize(np.full((3, 3), 7.0)).any()


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=30).filter(lambda v: max(v) > min(v)))
def test_min_max_idempotent(vals):
    once = min_max_normalize(np.array([vals]))
    assert once.min() == 0.0 and once.max() == 1.0
    np.testing.assert_allclose(min_max_normalize(once), once, atol=1e-12)


def test_multiply():
    a = np.array([[1.0, 2.0]], dtype=np.float32)
    np.testing.assert_array_equal(multiply_planes(a, np.ones_like(a)), a)
    assert not multiply_planes(a, np.zeros_like(a)).any()
    assert multiply_planes(a, np.array([[3.0, 4.0]])).tolist() == [[3.0, 8.0]]
    with pytest.raises(DimensionMismatch):
        multiply_planes(a, np.ones((2, 1)))


def test_gray_image_degenerate():
    img = np.full((32, 32, 3), 150, dtype=np.uint8)
    guide, stages = generate_guide_map(img, PipelineConfig(emit_stages=True))
    assert guide.dtype == np.float32 and guide.shape == (32, 32)
    assert not guide.any()
    assert stages.t == -1


def test_gray_gradient_degenerate():
    g = np.tile(np.arange(64, dtype=np.uint8) * 4, (16, 1))
    img = np.repeat(g[:, :, None], 3, axis=2)
    guide, stages = generate_guide_map(img, PipelineConfig(emit_stages=True))
    assert stages.t == -1 and not guide.any()


def test_phantom_blob_brighter():
    rgb, mask = generate_phantom(PhantomSpec(width=128, height=128, n_blobs=2, blob_radius_range=(8, 16), seed=3))
    guide, _ = generate_guide_map(rgb)
    assert guide[mask].mean() > guide[~mask].mean()


def test_non_degenerate_hits_endpoints(rng):
    img = rng.integers(0, 256, (40, 40, 3), dtype=np.uint8)
    guide, stages = generate_guide_map(img, PipelineConfig(emit_stages=True))
    assert stages.t >= 0
    assert guide.min() == 0.0 and guide.max() == 1.0


def test_stages_follow_the_steps(rng):
    img = rng.integers(0, 256, (24, 20, 3), dtype=np.uint8)
    cfg = PipelineConfig(emit_stages=True)
    guide, s = generate_guide_map(img, cfg)
    blurred = gaussian_blur_rgb(img)
    np.testing.assert_array_equal(s.x_rgb_blurred, blurred)
    lab, hsv = rgb_to_lab(blurred), rgb_to_hsv(blurred)
    np.testing.assert_array_equal(s.x_a, lab.a)
    np.testing.assert_array_equal(s.x_a_prime, np.maximum(lab.a - s.t, 0))
    np.testing.assert_allclose(s.x_a_dprime_pre_morph, s.x_a_prime * lab.l / 255.0, rtol=1e-6)
    np.testing.assert_allclose(s.x_a_tprime, s.x_a_dprime * hsv.v, rtol=1e-6)
    np.testing.assert_array_equal(s.guide, guide)
    for p in (s.x_a, s.x_a_prime, s.x_a_dprime, s.x_a_tprime, s.guide):
        assert p.shape == (24, 20)


def test_emit_stages_off():
    _, stages = generate_guide_map(np.zeros((4, 4, 3), np.uint8))
    assert stages is None


def test_threshold_override_used(rng):
    img = rng.integers(0, 256, (16, 16, 3), dtype=np.uint8)
    _, s = generate_guide_map(img, PipelineConfig(threshold_override=140, emit_stages=True))
    assert s.t == 140


def test_scale_conventions_agree(rng):
    img = rng.integers(0, 256, (48, 48, 3), dtype=np.uint8)
    g1, _ = generate_guide_map(img)
    g2, _ = generate_guide_map(img, PipelineConfig(lightness_scale=1.0, value_scale=255.0))
    np.testing.assert_allclose(g1, g2, atol=1e-6, rtol=0)


def test_deterministic(rng):
    img = rng.integers(0, 256, (30, 30, 3), dtype=np.uint8)
    a, _ = generate_guide_map(img)
    b, _ = generate_guide_map(img.copy())
    assert a.tobytes() == b.tobytes()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 143), st.floats(0.1, 60))
def test_monotone_evidence(seed, idx, bump):
    r = np.random.default_rng(seed)
    a = r.uniform(100, 200, (12, 12))
    l = r.uniform(0, 255, (12, 12))
    v = r.uniform(0, 1, (12, 12))
    cfg = PipelineConfig(morph=StructuringElement(3))
    before = guide_from_channels(a, l, v, 140, cfg)[4]
    a2 = a.copy()
    a2.flat[idx] += bump
    after = guide_from_channels(a2, l, v, 140, cfg)[4]
    assert after.flat[idx] >= before.flat[idx]


def test_assemble_guided():
    rgb = np.zeros((512, 512, 3), np.uint8)
    patch = assemble_guided(rgb, np.zeros((512, 512), np.float32))
    assert patch.rgb.shape == (512, 512, 3) and patch.guide.shape == (512, 512)
    assert patch.to_array().shape == (512, 512, 4)
    with pytest.raises(DimensionMismatch):
        assemble_guided(rgb, np.zeros((512, 511), np.float32))
    with pytest.raises(RangeError):
        assemble_guided(rgb[:1, :1], np.full((1, 1), 1.5, np.float32))


def test_assemble_keeps_unblurred_rgb(rng):
    img = rng.integers(0, 256, (8, 8, 3), dtype=np.uint8)
    guide, _ = generate_guide_map(img)
    np.testing.assert_array_equal(assemble_guided(img, guide).rgb, img)


def test_config_validation():
    with pytest.raises(ValueError):
        PipelineConfig(threshold_override=256)
    with pytest.raises(ValueError):
        PipelineConfig(lightness_scale=0)
