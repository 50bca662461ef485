import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bvguide import imgio
from bvguide.errors import CoverageGap
from bvguide.pipeline import PipelineConfig, generate_guide_map
from bvguide.synth import PhantomSpec, generate_phantom
from bvguide.tiler import (
    MANIFEST_HEADER,
    PadPolicy,
    TileSpec,
    crop,
    guide_large,
    pad_to_cover,
    plan_tiles,
    read_manifest,
    run_batch,
    stitch,
)


def test_grid_1024():
    recs = plan_tiles(1024, 1024, TileSpec(512, 512))
    assert [(r.x, r.y) for r in recs] == [(0, 0), (512, 0), (0, 512), (512, 512)]
    assert [r.tile_id for r in recs] == [0, 1, 2, 3]
    assert all(r.w == r.h == 512 for r in recs)


def test_skip_partial_small_image():
    assert plan_tiles(500, 500, TileSpec(512, 512, PadPolicy.SKIP_PARTIAL)) == []


def test_reflect_pad_700x512(rng):
    recs = plan_tiles(700, 512, TileSpec(512, 512, PadPolicy.REFLECT_PAD))
    assert [(r.x, r.y, r.w, r.h) for r in recs] == [(0, 0, 512, 512), (512, 0, 512, 512)]
    assert recs[1].x + recs[1].w - 700 == 324
    img = rng.integers(0, 256, (512, 700, 3), dtype=np.uint8)
    padded = pad_to_cover(img, recs)
    assert padded.shape == (512, 1024, 3)
    tile = crop(padded, recs[1])
    np.testing.assert_array_equal(tile[:, :188], img[:, 512:])
    # reflect-101: column 700 mirrors 698, column 701 mirrors 697, ...
    for j in range(324):
        np.testing.assert_array_equal(tile[:, 188 + j], img[:, 698 - j])


def _expected_count(n, tile, stride, policy):
    if policy is PadPolicy.SKIP_PARTIAL:
        return 0 if n < tile else (n - tile) // stride + 1
    return 1 if n <= tile else math.ceil((n - tile) / stride) + 1


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 1200), st.integers(1, 1200), st.integers(8, 600), st.data(), st.sampled_from(list(PadPolicy)))
def test_tile_count(w, h, tile, data, policy):
    stride = data.draw(st.integers(max(1, tile // 4), tile))
    recs = plan_tiles(w, h, TileSpec(tile, stride, policy))
    assert len(recs) == _expected_count(w, tile, stride, policy) * _expected_count(h, tile, stride, policy)
    for r in recs:
        if policy is PadPolicy.SKIP_PARTIAL:
            assert r.x + r.w <= w and r.y + r.h <= h
        assert r.x < w and r.y < h


def test_stitch_partition_roundtrip(rng):
    plane = rng.standard_normal((96, 64)).astype(np.float32)
    recs = plan_tiles(64, 96, TileSpec(32, 32))
    tiles = [crop(plane, r) for r in recs]
    assert stitch(recs, tiles, 64, 96).tobytes() == plane.tobytes()


def test_stitch_padded_roundtrip(rng):
    plane = rng.standard_normal((50, 70)).astype(np.float32)
    recs = plan_tiles(70, 50, TileSpec(32, 32))
    padded = pad_to_cover(plane, recs)
    assert stitch(recs, [crop(padded, r) for r in recs], 70, 50).tobytes() == plane.tobytes()


def test_stitch_overlap_constant():
    recs = plan_tiles(64, 64, TileSpec(32, 16))
    planes = [np.full((32, 32), 0.3, np.float32) for _ in recs]
    np.testing.assert_array_equal(stitch(recs, planes, 64, 64), np.full((64, 64), 0.3, np.float32))


def test_stitch_gap():
    recs = plan_tiles(64, 64, TileSpec(32, 32))
    planes = [np.zeros((32, 32), np.float32) for _ in recs]
    with pytest.raises(CoverageGap):
        stitch(recs[:-1], planes[:-1], 64, 64)


def test_guide_large_matches_per_tile():
    rgb, _ = generate_phantom(PhantomSpec(width=128, height=128, n_blobs=3, blob_radius_range=(6, 14), seed=1))
    big = guide_large(rgb, TileSpec(64, 64))
    np.testing.assert_array_equal(big[:64, :64], generate_guide_map(rgb[:64, :64])[0])


@pytest.fixture
def phantom_png(tmp_path):
    def _make(name, size, seed=0):
        rgb, _ = generate_phantom(PhantomSpec(width=size, height=size, n_blobs=4, blob_radius_range=(8, 30), seed=seed))
        path = tmp_path / name
        imgio.save_rgb8(rgb, path)
        return path

    return _make


def test_run_batch_1024(tmp_path, phantom_png):
    src = phantom_png("slide.png", 1024)
    out = tmp_path / "out"
    summary = run_batch([src], TileSpec(), PipelineConfig(), out, jobs=1)
    assert summary.tiles_processed == 4 and summary.failures == 0
    assert sorted(p.name for p in out.glob("*.gmap")) == [f"slide_{i:06d}.gmap" for i in range(4)]
    rows = read_manifest(out / "manifest.csv")
    assert len(rows) == 4 and list(rows[0]) == MANIFEST_HEADER
    raw = (out / "manifest.csv").read_bytes()
    assert b"\r" not in raw and raw.startswith(b"tile_id,source,x,y,w,h,t,gmap_path\n")
    img = imgio.load_rgb8(src)
    for row in rows:
        x, y, t = int(row["x"]), int(row["y"]), int(row["t"])
        guide, stages = generate_guide_map(img[y : y + 512, x : x + 512], PipelineConfig(emit_stages=True))
        assert stages.t == t
        assert imgio.read_gmap(out / row["gmap_path"]).tobytes() == guide.tobytes()


def test_run_batch_parallel_identical(tmp_path, phantom_png):
    src = phantom_png("a.png", 300)
    spec = TileSpec(128, 96)
    outs = []
    for jobs in (1, 3):
        out = tmp_path / f"out{jobs}"
        run_batch([src], spec, PipelineConfig(), out, jobs=jobs, png16=True, rgba=True)
        outs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    assert outs[0] == outs[1]
    assert any(name.endswith("_rgba.png") for name in outs[0])


def test_run_batch_bad_input(tmp_path, phantom_png):
    good = [phantom_png("g1.png", 200, 1), phantom_png("g2.png", 200, 2)]
    bad = tmp_path / "bad.png"
    bad.write_bytes(b"garbage")
    summary = run_batch([good[0], bad, good[1]], TileSpec(200, 200), PipelineConfig(), tmp_path / "o")
    assert summary.failures == 1 and summary.tiles_processed == 2
    assert len(read_manifest(tmp_path / "o" / "manifest.csv")) == 2
    assert summary.errors[0][0] == str(bad)


def test_tilespec_validation():
    with pytest.raises(ValueError):
        TileSpec(0, 1)
    with pytest.raises(ValueError):
        TileSpec(16, 17)
    assert TileSpec(16, 8, "skip").pad_policy is PadPolicy.SKIP_PARTIAL
