"""Coarse-to-fine estimation of a warp-field sequence.

The field sequence is produced by R sequential refinement rounds. Round r
minimizes alpha_r * data_term + gamma * beta_r * smoothness by projected
steepest descent with a backtracking line search, warm-started from the
previous round, over an image pyramid (coarsest level first). Increasing
alpha and decreasing beta make later rounds warp more aggressively while
relaxing the content-retention constraint.

Everything here is deterministic: same inputs and schedule give the same
result bit for bit.
"""

import warnings
from dataclasses import dataclass, field as dataclass_field

import numpy as np
from scipy import ndimage

from .losses import (
    LossBreakdown,
    rgb_grad,
    rgb_term,
    shape_grad,
    shape_term,
    smooth_grad,
    smooth_term,
)
from .masks import binarize, smoothness_mask, soften, validate_binary_mask
from .pngio import validate_image
from .warp import (
    block_mean,
    downsample_field,
    upsample_field,
    validate_field,
    warp_apply,
    zero_field,
)

__all__ = [
    "NumericalError",
    "WarpSchedule",
    "WarpResult",
    "positional_encoding",
    "centroid_init",
    "correlation_init",
    "optimize",
]

INIT_MODES = ("zero", "centroid", "correlation")

# weight of the occupancy-patch part of a correlation cell feature relative
# to the positional encoding; high enough that matching local shape beats
# positional proximity
_PATCH_GAIN = 4.0

_STEP_GROWTH = 1.3
_MAX_REJECTS = 20

# the raw data-term gradient is spatially spiky (per-pixel signs), so a step
# along it raises the kinked smoothness norms faster than it lowers the data
# term and the search stalls; descending along a Gaussian-filtered direction
# keeps updates locally coherent while the line search still only accepts
# true decreases of the unmodified objective
_DIRECTION_SIGMA = 3.0


class NumericalError(RuntimeError):
    """Loss became non-finite; carries the traces recorded so far."""

    def __init__(self, message, traces=None):
        super().__init__(message)
        self.traces = traces or []


@dataclass(frozen=True)
class WarpSchedule:
    """Weights and iteration counts for the refinement rounds.

    alpha weights the data term per round, beta the smoothness (both lists
    of length `rounds`), gamma scales the whole smoothness part. The
    pyramid runs `pyramid_levels` scales ending at full resolution
    (3 levels = 1/4, 1/2, 1/1).
    """

    rounds: int = 3
    alpha: tuple = (0.1, 0.2, 1.0)
    beta: tuple = (0.1, 0.05, 0.01)
    gamma: float = 1.0
    pyramid_levels: int = 3
    iters_per_level: int = 300
    step_size: float = 1.0
    soften_sigma: float = 2.0
    init: str = "centroid"
    kernel_size: int = 9

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))
        if self.rounds != len(self.alpha) or self.rounds != len(self.beta):
            raise ValueError(
                f"rounds={self.rounds} but {len(self.alpha)} alpha / "
                f"{len(self.beta)} beta weights"
            )
        if self.pyramid_levels < 1 or self.iters_per_level < 0:
            raise ValueError("pyramid_levels must be >= 1, iters_per_level >= 0")
        if not (0 < self.step_size < np.inf):
            raise ValueError("step_size must be positive and finite")
        if not np.isfinite(self.gamma) or not np.isfinite(self.soften_sigma):
            raise ValueError("gamma and soften_sigma must be finite")
        if any(not np.isfinite(v) for v in self.alpha + self.beta):
            raise ValueError("alpha and beta weights must be finite")
        if self.init not in INIT_MODES:
            raise ValueError(f"init must be one of {INIT_MODES}, got {self.init!r}")
        if any(a2 <= a1 for a1, a2 in zip(self.alpha, self.alpha[1:])):
            warnings.warn("alpha weights are not increasing", stacklevel=3)
        if any(b2 >= b1 for b1, b2 in zip(self.beta, self.beta[1:])):
            warnings.warn("beta weights are not decreasing", stacklevel=3)


@dataclass
class WarpResult:
    """Output of optimize: field sequence, traces, and final warps."""

    fields: list
    traces: list
    final_warped_mask: np.ndarray
    final_warped_image: np.ndarray
    schedule: WarpSchedule = dataclass_field(default=None)


def positional_encoding(h8, w8, d=256):
    """Sinusoidal position grid of shape (h8, w8, d), values in [-1, 1].

    Entry (i, j, k) encodes the linearized position pos = j * w8 + i at
    frequency 10000**(-k/d): sin for even k, cos for odd k (sharing the
    even exponent).
    """
    if d % 2 != 0:
        raise ValueError(f"channel count must be even, got {d}")
    i = np.arange(h8, dtype=np.float64)[:, None]
    j = np.arange(w8, dtype=np.float64)[None, :]
    pos = j * w8 + i
    k = np.arange(d)
    exponent = np.where(k % 2 == 0, k, k - 1) / d
    angles = pos[:, :, None] / (10000.0 ** exponent)
    return np.where(k % 2 == 0, np.sin(angles), np.cos(angles))


def centroid_init(m_s, m_t):
    """Constant field moving the target's mass centroid onto the source's.

    Backward convention: every target pixel samples the source at an offset
    of centroid(source) - centroid(target).
    """
    m_s = validate_binary_mask(m_s, "m_s")
    m_t = validate_binary_mask(m_t, "m_t")
    if m_s.shape != m_t.shape:
        raise ValueError(f"mask shapes differ: {m_s.shape} vs {m_t.shape}")
    if m_s.sum() == 0 or m_t.sum() == 0:
        raise ValueError("no object: empty mask")
    sy, sx = np.nonzero(m_s)
    ty, tx = np.nonzero(m_t)
    field = zero_field(*m_s.shape)
    field[:, :, 0] = sx.mean() - tx.mean()
    field[:, :, 1] = sy.mean() - ty.mean()
    return field


def _cell_features(occupancy, d):
    """Per-cell matching features: gained 3x3 occupancy patch + position code.

    The patch (zero padded at grid borders) is tiled up to d channels. The
    feature is l2-normalized so correlation peaks exactly at an identical
    cell; the position code then only breaks ties between look-alike cells.
    """
    h8, w8 = occupancy.shape
    padded = np.pad(occupancy, 1, mode="constant")
    patch = np.empty((h8, w8, 9), dtype=np.float64)
    idx = 0
    for di in range(3):
        for dj in range(3):
            patch[:, :, idx] = padded[di : di + h8, dj : dj + w8]
            idx += 1
    reps = -(-d // 9)
    tiled = np.tile(patch, (1, 1, reps))[:, :, :d] * _PATCH_GAIN
    feat = tiled + positional_encoding(h8, w8, d)
    norms = np.linalg.norm(feat, axis=2, keepdims=True)
    return feat / np.maximum(norms, 1e-12)


def correlation_init(m_s, m_t, d=256):
    """Warm-start field from all-pairs correlation of coarse cell features.

    Both soft masks are area-averaged to 1/8 resolution; each target cell
    picks the source cell with the highest feature correlation, the
    resulting cell displacements are 3x3 median filtered, and the coarse
    field is upsampled back to pixel resolution.
    """
    m_s = np.asarray(m_s, dtype=np.float64)
    m_t = np.asarray(m_t, dtype=np.float64)
    if m_s.shape != m_t.shape or m_s.ndim != 2:
        raise ValueError(f"mask shapes differ: {m_s.shape} vs {m_t.shape}")
    h, w = m_s.shape
    if h % 8 or w % 8:
        raise ValueError(f"dimensions must be divisible by 8, got {h}x{w}")
    occ_s = block_mean(m_s, 8)
    occ_t = block_mean(m_t, 8)
    if occ_s.sum() == 0 or occ_t.sum() == 0:
        return zero_field(h, w)
    h8, w8 = occ_s.shape
    feat_s = _cell_features(occ_s, d)
    feat_t = _cell_features(occ_t, d)
    corr = np.einsum("ijd,kld->ijkl", feat_t, feat_s)
    best = corr.reshape(h8, w8, h8 * w8).argmax(axis=2)
    src_i, src_j = np.divmod(best, w8)
    tgt_i, tgt_j = np.mgrid[0:h8, 0:w8]
    coarse = np.stack(
        ((src_j - tgt_j).astype(np.float64), (src_i - tgt_i).astype(np.float64)),
        axis=-1,
    )
    for c in range(2):
        coarse[:, :, c] = ndimage.median_filter(coarse[:, :, c], size=3, mode="mirror")
    return upsample_field(coarse, 8)


class _Level:
    """Precomputed per-scale data for one pyramid level.

    The data term is a sum of mask pairs (one for plain warping, one per
    label for region-constrained warping) or an image pair for the direct
    pixel objective.
    """

    def __init__(self, factor, shape, m_smooth, mask_pairs=None, image_pair=None):
        self.factor = factor
        self.shape = shape
        self.m_smooth = m_smooth
        self.mask_pairs = mask_pairs
        self.image_pair = image_pair

    def data_value(self, fld):
        if self.image_pair is not None:
            return rgb_term(fld, *self.image_pair)
        return sum(shape_term(fld, s, t) for s, t in self.mask_pairs)

    def data_grad(self, fld):
        if self.image_pair is not None:
            return rgb_grad(fld, *self.image_pair)
        grad = shape_grad(fld, *self.mask_pairs[0])
        for s, t in self.mask_pairs[1:]:
            grad += shape_grad(fld, s, t)
        return grad


def _descend(fld, level, alpha, beta, gamma, schedule, trace, round_index):
    """Line-searched steepest descent at one pyramid level.

    Accepted steps strictly decrease the weighted loss; the step length is
    the max displacement change in pixels, halved on rejection and regrown
    on acceptance. Stops after the iteration budget or 20 consecutive
    rejections.
    """

    def parts(f):
        return level.data_value(f), smooth_term(f, level.m_smooth)

    def combine(d, s):
        return alpha * d + gamma * beta * s

    data_v, smooth_v = parts(fld)
    current = combine(data_v, smooth_v)
    _check_finite(current, trace)
    if trace is not None:
        trace.append(
            LossBreakdown(round_index, data_v, smooth_v, alpha, beta, gamma)
        )
    step = schedule.step_size
    max_step = 8.0 * schedule.step_size
    grad = None
    rejects = 0
    for _ in range(schedule.iters_per_level):
        if grad is None:
            grad = alpha * level.data_grad(fld) + gamma * beta * smooth_grad(
                fld, level.m_smooth
            )
            for c in range(2):
                grad[:, :, c] = ndimage.gaussian_filter(
                    grad[:, :, c], _DIRECTION_SIGMA, mode="nearest"
                )
            gmax = np.abs(grad).max()
            if gmax < 1e-14:
                break
        cand = fld - (step / gmax) * grad
        data_c, smooth_c = parts(cand)
        candidate = combine(data_c, smooth_c)
        _check_finite(candidate, trace)
        if candidate < current:
            fld, current = cand, candidate
            data_v, smooth_v = data_c, smooth_c
            if trace is not None:
                trace.append(
                    LossBreakdown(round_index, data_v, smooth_v, alpha, beta, gamma)
                )
            grad = None
            step = min(step * _STEP_GROWTH, max_step)
            rejects = 0
        else:
            step *= 0.5
            rejects += 1
            if rejects >= _MAX_REJECTS:
                break
    return fld


def _check_finite(value, trace):
    if not np.isfinite(value):
        tail = "" if not trace else f"; last rows: {trace[-3:]}"
        raise NumericalError(
            f"loss became non-finite ({value}){tail}",
            traces=list(trace) if trace else [],
        )


def _build_levels(m_s, m_t, m_smooth, schedule, images=None, labels=None):
    levels = []
    for s in reversed(range(schedule.pyramid_levels)):
        factor = 2 ** s
        # keep thin smoothness bands alive at coarse scales
        msm_l = (block_mean(m_smooth, factor) > 0).astype(np.uint8)
        shape = msm_l.shape
        if images is not None:
            pair = (block_mean(images[0], factor), block_mean(images[1], factor))
            levels.append(_Level(factor, shape, msm_l, image_pair=pair))
            continue
        pairs = []
        if labels is not None:
            src_labels, tgt_labels = labels
            for lab in sorted(np.unique(src_labels).tolist()):
                src_ind = binarize(
                    block_mean((src_labels == lab).astype(np.uint8), factor), 0.5
                )
                tgt_ind = binarize(
                    block_mean((tgt_labels == lab).astype(np.uint8), factor), 0.5
                )
                pairs.append(
                    (
                        soften(src_ind, schedule.soften_sigma),
                        soften(tgt_ind, schedule.soften_sigma),
                    )
                )
        else:
            ms_l = binarize(block_mean(m_s, factor), 0.5)
            mt_l = binarize(block_mean(m_t, factor), 0.5)
            pairs.append(
                (
                    soften(ms_l, schedule.soften_sigma),
                    soften(mt_l, schedule.soften_sigma),
                )
            )
        levels.append(_Level(factor, shape, msm_l, mask_pairs=pairs))
    return levels


def _initial_field(m_s, m_t, schedule):
    if schedule.init == "zero":
        return zero_field(*m_s.shape)
    if schedule.init == "centroid":
        return centroid_init(m_s, m_t)
    return correlation_init(
        soften(m_s, schedule.soften_sigma), soften(m_t, schedule.soften_sigma)
    )


def optimize(
    src_img,
    m_s,
    m_t,
    schedule=None,
    *,
    data_term="mask",
    tgt_img=None,
    src_labels=None,
    tgt_labels=None,
):
    """Estimate the warp-field sequence matching the source to the target.

    Runs `schedule.rounds` sequential coarse-to-fine refinement rounds on
    the softened masks (or, with data_term="rgb", directly on the pixel
    values of src_img vs tgt_img, keeping everything else identical). The
    smoothness region is computed once from the binary masks. Passing
    matching label maps restricts sampling region by region: the data term
    becomes the sum of per-label shape terms. Returns a WarpResult whose
    fields are all at full resolution; the final outputs warp the binarized
    mask and src_img by the last field.

    Raises ValueError for inconsistent or empty inputs and NumericalError
    if the loss turns non-finite.
    """
    schedule = schedule or WarpSchedule()
    m_s = validate_binary_mask(m_s, "m_s")
    m_t = validate_binary_mask(m_t, "m_t")
    src_img = validate_image(src_img, "src_img")
    if m_s.shape != m_t.shape or src_img.shape[:2] != m_s.shape:
        raise ValueError(
            f"dimensions differ: image {src_img.shape[:2]}, masks {m_s.shape} / {m_t.shape}"
        )
    if m_s.sum() == 0 or m_t.sum() == 0:
        raise ValueError("no object: empty mask")
    if data_term not in ("mask", "rgb"):
        raise ValueError(f"data_term must be 'mask' or 'rgb', got {data_term!r}")
    labels = None
    if data_term == "rgb":
        if src_labels is not None or tgt_labels is not None:
            raise ValueError("label maps cannot be combined with the rgb data term")
        tgt_img = validate_image(tgt_img, "tgt_img")
        if tgt_img.shape != src_img.shape:
            raise ValueError("tgt_img must match src_img dimensions")
    elif src_labels is not None or tgt_labels is not None:
        src_labels = np.asarray(src_labels)
        tgt_labels = np.asarray(tgt_labels)
        if src_labels.shape != m_s.shape or tgt_labels.shape != m_s.shape:
            raise ValueError("label maps must match the mask dimensions")
        src_set = set(np.unique(src_labels).tolist())
        tgt_set = set(np.unique(tgt_labels).tolist())
        if src_set != tgt_set:
            raise ValueError(
                f"label sets differ: {sorted(src_set)} vs {sorted(tgt_set)}"
            )
        labels = (src_labels, tgt_labels)

    m_smooth = smoothness_mask(m_s, m_t, schedule.kernel_size)
    levels = _build_levels(
        m_s,
        m_t,
        m_smooth,
        schedule,
        images=(src_img, tgt_img) if data_term == "rgb" else None,
        labels=labels,
    )

    current = _initial_field(m_s, m_t, schedule)
    fields = []
    traces = []
    for r in range(schedule.rounds):
        alpha, beta = schedule.alpha[r], schedule.beta[r]
        trace_r = []
        fld = None
        for li, level in enumerate(levels):
            finest = li == len(levels) - 1
            if li == 0:
                fld = downsample_field(current, level.factor)
            else:
                fld = upsample_field(fld, 2)
                fld = fld[: level.shape[0], : level.shape[1]]
            fld = _descend(
                fld,
                level,
                alpha,
                beta,
                schedule.gamma,
                schedule,
                trace_r if finest else None,
                r,
            )
        current = fld
        fields.append(current.copy())
        traces.append(trace_r)

    final_mask = binarize(warp_apply(fields[-1], m_s.astype(np.float64)), 0.5)
    final_image = warp_apply(fields[-1], src_img)
    return WarpResult(fields, traces, final_mask, final_image, schedule)
