"""Build the edge-band and smoothness masks for a shape pair, step by step.

The smoothness mask marks where warp-field regularization applies: the
compression region (target edge band inside the source object) union the
expansion region (target area the source does not cover).
"""

from pathlib import Path

from maskwarp import edge_band, mask_logic, save_mask, smoothness_mask
from maskwarp.synth import disc_mask, star_mask

OUT = Path(__file__).parent / "output" / "smoothness"
OUT.mkdir(parents=True, exist_ok=True)

m_s = disc_mask(128, 128, 64, 64, 26)
m_t = star_mask(128, 128, 64, 64, 40, 18)

band = edge_band(m_t, 9)
compress = mask_logic(band, m_s, "AND")
expand = mask_logic(mask_logic(m_s, m_t, "XOR"), m_t, "AND")
m_smooth = smoothness_mask(m_s, m_t, 9)

for name, mask in [
    ("source", m_s),
    ("target", m_t),
    ("target_edge_band", band),
    ("compression_region", compress),
    ("expansion_region", expand),
    ("smoothness_mask", m_smooth),
]:
    save_mask(mask, OUT / f"{name}.png")
    print(f"{name:20s} {int(mask.sum()):6d} px")

assert (m_smooth == (compress | expand)).all()
print(f"\nwrote PNGs to {OUT}")
