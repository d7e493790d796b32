"""Compare the mask-space objective against direct pixel matching.

Both optimizations share the same smoothness region, schedule, and warm
start; only the data term differs. The mask objective collapses to a small
fraction of its starting value while the pixel objective barely improves,
because unrelated textures give no usable matching signal.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from maskwarp import optimize, rgb_term, shape_term, soften, zero_field
from maskwarp.synth import benchmark_pairs

OUT = Path(__file__).parent / "output"
OUT.mkdir(parents=True, exist_ok=True)

pair = benchmark_pairs(128)[2]  # disc -> star
h, w = pair["src_mask"].shape

res_mask = optimize(pair["src_img"], pair["src_mask"], pair["tgt_mask"])
res_rgb = optimize(
    pair["src_img"], pair["src_mask"], pair["tgt_mask"],
    data_term="rgb", tgt_img=pair["tgt_img"],
)

base_mask = shape_term(
    zero_field(h, w), soften(pair["src_mask"], 2.0), soften(pair["tgt_mask"], 2.0)
)
base_rgb = rgb_term(zero_field(h, w), pair["src_img"], pair["tgt_img"])

curve_mask = [b.shape / base_mask for tr in res_mask.traces for b in tr]
curve_rgb = [b.shape / base_rgb for tr in res_rgb.traces for b in tr]

print(f"normalized final data term, mask objective: {curve_mask[-1]:.4f}")
print(f"normalized final data term, pixel objective: {curve_rgb[-1]:.4f}")

fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(curve_mask, label="mask objective")
ax.plot(curve_rgb, label="pixel objective")
ax.set_xlabel("accepted step")
ax.set_ylabel("data term / initial value")
ax.set_title("mask vs pixel matching on disc-to-star")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "mask_vs_rgb.png", dpi=120)
print(f"loss curves: {OUT / 'mask_vs_rgb.png'}")
