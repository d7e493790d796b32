"""maskwarp: mask-guided large-displacement warping and evaluation tools.

The library estimates dense backward warp fields that deform a source
object to match a target silhouette by minimizing a shape-consistency
term plus an edge-band smoothness regularizer, and provides the
interest-consistency and image-quality metrics used to evaluate the
results.
"""

from .masks import (
    binarize,
    edge_band,
    mask_logic,
    smoothness_mask,
    soften,
)
from .pngio import load_image, load_label_mask, load_mask, save_image, save_mask
from .warp import (
    block_mean,
    downsample_field,
    read_wfld,
    upsample_field,
    warp_apply,
    write_wfld,
    zero_field,
)
from .losses import (
    LossBreakdown,
    region_shape_term,
    rgb_term,
    shape_grad,
    shape_term,
    smooth_grad,
    smooth_term,
    total_loss,
    write_trace_csv,
)
from .optim import (
    NumericalError,
    WarpResult,
    WarpSchedule,
    centroid_init,
    correlation_init,
    optimize,
    positional_encoding,
)
from .interest import (
    InterestHeads,
    IRParams,
    correspondence_grid,
    descriptor_loss,
    ictt_total,
    ir_loss,
    point_loss,
    read_sphd,
    write_sphd,
)
from .metrics import SsimParams, iou, luminance, miou, ssim

__version__ = "0.1.0"
