# %% [markdown]
# # Scoring guide maps against ground truth
#
# A guide map is not a segmentation, but thresholding it shows how much of
# the vessel signal it already carries.

# %%
import numpy as np

from bvguide import generate_guide_map, generate_phantom, PhantomSpec, sweep
from bvguide.metrics import confusion, binarize, macro_average, micro_average

counts = []
for seed in range(5):
    rgb, mask = generate_phantom(PhantomSpec(seed=seed, noise_sigma=8))
    guide, _ = generate_guide_map(rgb)
    counts.append(confusion(binarize(guide, 0.5), mask))

micro = micro_average(counts)
macro = macro_average(counts)
print(f"micro dsc={micro.dsc:.4f} iou={micro.iou:.4f}")
print(f"macro dsc={macro[0]:.4f} iou={macro[1]:.4f}")

# %%
rgb, mask = generate_phantom(PhantomSpec(seed=0, noise_sigma=8))
guide, _ = generate_guide_map(rgb)
for thr, rep in sweep(guide, mask, np.linspace(0, 1, 11)):
    print(f"threshold={thr:.1f} dsc={rep.dsc:.4f} iou={rep.iou:.4f}")
