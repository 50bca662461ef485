# %% [markdown]
# # Tiling a large image into 512 x 512 patches
#
# Batch mode writes one GMAP per tile plus `manifest.csv`; stitching the tiles
# back reproduces a full-size map.

# %%
from pathlib import Path

import numpy as np

from bvguide import imgio
from bvguide.pipeline import PipelineConfig
from bvguide.synth import PhantomSpec, generate_phantom
from bvguide.tiler import TileSpec, plan_tiles, read_manifest, run_batch, stitch

OUT = Path("notebook_output")
OUT.mkdir(exist_ok=True)

rgb, mask = generate_phantom(PhantomSpec(width=1100, height=700, n_blobs=20, seed=2))
imgio.save_rgb8(rgb, OUT / "roi.png")

# %%
spec = TileSpec(tile=512, stride=512)
for rec in plan_tiles(1100, 700, spec):
    print(rec)

# %%
summary = run_batch([OUT / "roi.png"], spec, PipelineConfig(), OUT / "tiles", jobs=2)
print(summary)
rows = read_manifest(OUT / "tiles" / "manifest.csv")
print("per-tile thresholds:", [int(r["t"]) for r in rows])

# %%
records = plan_tiles(1100, 700, spec)
planes = [imgio.read_gmap(OUT / "tiles" / r["gmap_path"]) for r in rows]
full = stitch(records, planes, 1100, 700)
print("stitched map", full.shape, "range", float(full.min()), float(full.max()))
