"""Batch-score warp quality (mIoU) and image similarity (SSIM).

Builds a small result set on disk and evaluates it both through the library
and through the command-line batch interface with a pred,gt manifest.
"""

import subprocess
import sys
from pathlib import Path

from maskwarp import iou, miou, optimize, save_mask, ssim
from maskwarp.synth import benchmark_pairs

OUT = Path(__file__).parent / "output" / "metrics"
OUT.mkdir(parents=True, exist_ok=True)

pairs = benchmark_pairs(128)[:3]
scored = []
for p in pairs:
    res = optimize(p["src_img"], p["src_mask"], p["tgt_mask"])
    save_mask(res.final_warped_mask, OUT / f"{p['name']}_pred.png")
    save_mask(p["tgt_mask"], OUT / f"{p['name']}_gt.png")
    scored.append((res.final_warped_mask, p["tgt_mask"]))
    s = ssim(res.final_warped_image, p["tgt_img"])
    print(f"{p['name']:20s} IoU {iou(*scored[-1]):.4f}  SSIM vs target image {s:.4f}")

print(f"mIoU over {len(scored)} pairs: {miou(scored):.4f}")

manifest = OUT / "manifest.csv"
manifest.write_text(
    "".join(f"{p['name']}_pred.png,{p['name']}_gt.png\n" for p in pairs)
)
print("\nsame thing through the CLI:")
subprocess.run(
    [sys.executable, "-m", "maskwarp.cli", "eval", "miou", str(manifest)], check=True
)
