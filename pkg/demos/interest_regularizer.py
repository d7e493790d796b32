"""Score content preservation between detector heads of two images.

The regularizer compares the raw 65-channel point head and unit-normalized
256-channel descriptor head of an image before and after an edit. Heads
travel through the SPHD binary format, so anything that can produce that
file can feed this evaluation.
"""

from pathlib import Path

import numpy as np

from maskwarp import (
    InterestHeads,
    IRParams,
    correspondence_grid,
    ir_loss,
    read_sphd,
    write_sphd,
)

OUT = Path(__file__).parent / "output"
OUT.mkdir(parents=True, exist_ok=True)

rng = np.random.default_rng(42)
hc = wc = 16

point = rng.standard_normal((hc, wc, 65))
desc = rng.standard_normal((hc, wc, 256))
desc /= np.linalg.norm(desc, axis=2, keepdims=True)
heads = InterestHeads(point_head=point, desc_head=desc)

write_sphd(heads, OUT / "content.sphd")
heads_back = read_sphd(OUT / "content.sphd")

g = correspondence_grid(hc, wc, cell_size=8, tau=8.0)
print(f"correspondence grid: {int(g.sum())} positive pairs of {hc*wc*hc*wc}")

total, point_part, desc_part = ir_loss(heads_back, heads_back)
print(f"identical heads:  total {total:.6f}  point {point_part}  desc {desc_part:.3f}")

for noise in (0.05, 0.2, 0.8):
    p2 = point + noise * rng.standard_normal(point.shape)
    d2 = desc + noise * rng.standard_normal(desc.shape)
    d2 /= np.linalg.norm(d2, axis=2, keepdims=True)
    other = InterestHeads(point_head=p2, desc_head=d2)
    total, point_part, desc_part = ir_loss(heads_back, other, IRParams())
    print(
        f"perturbed ({noise:.2f}): total {total:10.4f}  point {point_part:10.4f}  "
        f"desc {desc_part:8.3f}"
    )
print("larger edits score a larger regularizer, as they should")
