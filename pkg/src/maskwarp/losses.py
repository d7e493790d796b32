"""Warping objective: shape-consistency data term, masked first-order
smoothness regularizer, and their analytic (sub)gradients w.r.t. the field.

All data terms are means over pixels so weights transfer across
resolutions. Subgradient conventions: sign(0) = 0; a neighbor-difference
direction collapses to the zero vector when its norm is below 1e-12.
"""

from dataclasses import dataclass

import numpy as np

from .masks import soften, validate_binary_mask, validate_soft_mask
from .warp import (
    _sample_coords,
    bilinear_sample,
    bilinear_sample_grad,
    validate_field,
    warp_apply,
)

__all__ = [
    "LossBreakdown",
    "shape_term",
    "shape_grad",
    "smooth_term",
    "smooth_grad",
    "rgb_term",
    "rgb_grad",
    "region_shape_term",
    "total_loss",
    "write_trace_csv",
]

# neighbor offsets (di, dj) of the first-order smoothness stencil:
# vertical, horizontal, down-right diagonal, down-left diagonal
_SMOOTH_OFFSETS = ((1, 0), (0, 1), (1, 1), (1, -1))

_NORM_EPS = 1e-12


@dataclass(frozen=True)
class LossBreakdown:
    """Per-round loss record; shape/smooth are stored unweighted."""

    round_index: int
    shape: float
    smooth: float
    alpha: float
    beta: float
    gamma: float

    @property
    def total(self):
        return self.alpha * self.shape + self.gamma * self.beta * self.smooth


def _check_same_grid(field, a, b):
    if a.shape[:2] != b.shape[:2] or a.shape[:2] != field.shape[:2]:
        raise ValueError(
            f"dimensions differ: field {field.shape[:2]}, {a.shape[:2]}, {b.shape[:2]}"
        )


def shape_term(field, src, tgt):
    """Mean absolute difference between the warped source mask and target."""
    field = validate_field(field)
    src = validate_soft_mask(src, "src")
    tgt = validate_soft_mask(tgt, "tgt")
    _check_same_grid(field, src, tgt)
    return float(np.mean(np.abs(warp_apply(field, src) - tgt)))


def shape_grad(field, src, tgt):
    """Gradient of shape_term w.r.t. the field.

    d/d(dx, dy) = sign(warped - tgt) / (H * W) times the spatial derivative
    of the bilinear sample of src at each pixel's sample point.
    """
    field = validate_field(field)
    src = validate_soft_mask(src, "src")
    tgt = validate_soft_mask(tgt, "tgt")
    _check_same_grid(field, src, tgt)
    h, w = field.shape[:2]
    xs, ys = _sample_coords(field)
    warped = bilinear_sample(src, xs, ys)
    sgn = np.sign(warped - tgt) / (h * w)
    dx, dy = bilinear_sample_grad(src, xs, ys)
    return np.stack((sgn * dx, sgn * dy), axis=-1)


def smooth_term(field, m):
    """Masked first-order smoothness of the field.

    For each mask pixel, sums the l2 norms of the displacement differences
    to its vertical, horizontal, and two lower-diagonal neighbors,
    normalized by the mask population. Neighbors outside the grid are
    skipped; an empty mask yields 0.
    """
    field = validate_field(field)
    m = validate_binary_mask(m)
    if m.shape != field.shape[:2]:
        raise ValueError(f"dimensions differ: field {field.shape[:2]}, mask {m.shape}")
    count = int(m.sum())
    if count == 0:
        return 0.0
    total = 0.0
    for di, dj in _SMOOTH_OFFSETS:
        center, neigh = _offset_views(field, di, dj)
        mview = _offset_views(m, di, dj)[0]
        diff = neigh - center
        norms = np.sqrt(np.sum(diff * diff, axis=-1))
        total += float(np.sum(mview * norms))
    return total / count


def smooth_grad(field, m):
    """Exact subgradient of smooth_term (zero on sub-1e-12 differences)."""
    field = validate_field(field)
    m = validate_binary_mask(m)
    if m.shape != field.shape[:2]:
        raise ValueError(f"dimensions differ: field {field.shape[:2]}, mask {m.shape}")
    grad = np.zeros_like(field)
    count = int(m.sum())
    if count == 0:
        return grad
    h, w = field.shape[:2]
    for di, dj in _SMOOTH_OFFSETS:
        center, neigh = _offset_views(field, di, dj)
        mview = _offset_views(m, di, dj)[0]
        diff = neigh - center
        norms = np.sqrt(np.sum(diff * diff, axis=-1))
        scale = np.where(norms > _NORM_EPS, mview / np.maximum(norms, _NORM_EPS), 0.0)
        unit = diff * scale[..., None]
        ci, cj = max(0, -di), max(0, -dj)
        gi, gj = max(0, di), max(0, dj)
        hh, ww = unit.shape[:2]
        grad[ci : ci + hh, cj : cj + ww] -= unit
        grad[gi : gi + hh, gj : gj + ww] += unit
    return grad / count


def _offset_views(arr, di, dj):
    """Views of arr at the stencil center and at the (di, dj) neighbor."""
    h, w = arr.shape[:2]
    ci, cj = max(0, -di), max(0, -dj)
    gi, gj = max(0, di), max(0, dj)
    hh, ww = h - abs(di), w - abs(dj)
    center = arr[ci : ci + hh, cj : cj + ww]
    neigh = arr[gi : gi + hh, gj : gj + ww]
    return center, neigh


def rgb_term(field, src_img, tgt_img):
    """Mean absolute pixel difference of the warped source image vs target.

    The image-space counterpart of shape_term, used to compare direct
    pixel matching against mask matching.
    """
    field = validate_field(field)
    src_img = np.asarray(src_img, dtype=np.float64)
    tgt_img = np.asarray(tgt_img, dtype=np.float64)
    if src_img.shape != tgt_img.shape or src_img.shape[:2] != field.shape[:2]:
        raise ValueError(
            f"dimensions differ: field {field.shape[:2]}, src {src_img.shape}, "
            f"tgt {tgt_img.shape}"
        )
    return float(np.mean(np.abs(warp_apply(field, src_img) - tgt_img)))


def rgb_grad(field, src_img, tgt_img):
    """Gradient of rgb_term w.r.t. the field (mean over pixels and channels)."""
    field = validate_field(field)
    src_img = np.asarray(src_img, dtype=np.float64)
    tgt_img = np.asarray(tgt_img, dtype=np.float64)
    if src_img.shape != tgt_img.shape or src_img.shape[:2] != field.shape[:2]:
        raise ValueError("dimension mismatch")
    xs, ys = _sample_coords(field)
    warped = bilinear_sample(src_img, xs, ys)
    sgn = np.sign(warped - tgt_img) / warped.size
    dx, dy = bilinear_sample_grad(src_img, xs, ys)
    if src_img.ndim == 3:
        return np.stack((np.sum(sgn * dx, axis=-1), np.sum(sgn * dy, axis=-1)), axis=-1)
    return np.stack((sgn * dx, sgn * dy), axis=-1)


def region_shape_term(field, src_labels, tgt_labels, sigma=2.0):
    """Sum of per-region shape terms over a labeled partition.

    Each label's indicator (background label 0 included) is softened and
    scored with shape_term; regions constrain which source area each target
    area may sample from.
    """
    field = validate_field(field)
    src_labels = np.asarray(src_labels)
    tgt_labels = np.asarray(tgt_labels)
    if src_labels.shape != tgt_labels.shape or src_labels.shape != field.shape[:2]:
        raise ValueError("dimension mismatch between field and label maps")
    src_set = set(np.unique(src_labels).tolist())
    tgt_set = set(np.unique(tgt_labels).tolist())
    if src_set != tgt_set:
        raise ValueError(f"label sets differ: {sorted(src_set)} vs {sorted(tgt_set)}")
    total = 0.0
    for label in sorted(src_set):
        src_ind = soften((src_labels == label).astype(np.uint8), sigma)
        tgt_ind = soften((tgt_labels == label).astype(np.uint8), sigma)
        total += shape_term(field, src_ind, tgt_ind)
    return total


def total_loss(fields, src, tgt, smooth_m, schedule):
    """Combined weighted loss over a field sequence.

    Returns (breakdowns, total) where total =
    sum_r alpha_r * shape_term(field_r) + gamma * sum_r beta_r * smooth_term(field_r).
    """
    if len(fields) != len(schedule.alpha):
        raise ValueError(
            f"{len(fields)} fields do not match schedule of length {len(schedule.alpha)}"
        )
    breakdowns = []
    total = 0.0
    for r, field in enumerate(fields):
        bd = LossBreakdown(
            round_index=r,
            shape=shape_term(field, src, tgt),
            smooth=smooth_term(field, smooth_m),
            alpha=schedule.alpha[r],
            beta=schedule.beta[r],
            gamma=schedule.gamma,
        )
        breakdowns.append(bd)
        total += bd.total
    return breakdowns, total


def write_trace_csv(traces, path):
    """Write per-round traces as CSV rows: round,iter,shape,smooth,total."""
    with open(path, "w", newline="") as fh:
        fh.write("round,iter,shape,smooth,total\n")
        for r, rows in enumerate(traces):
            for it, bd in enumerate(rows):
                fh.write(f"{r},{it},{bd.shape:.17g},{bd.smooth:.17g},{bd.total:.17g}\n")
