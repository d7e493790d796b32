"""Evaluation metrics: intersection-over-union for warped masks and SSIM
for content preservation of stylized images."""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .masks import validate_binary_mask
from .pngio import validate_image

__all__ = ["SsimParams", "iou", "miou", "ssim", "luminance"]

# Rec. 601 luma weights
_LUMA = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class SsimParams:
    window: int = 11
    sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 1.0

    def __post_init__(self):
        if self.window % 2 == 0 or self.window < 3:
            raise ValueError(f"window must be odd and >= 3, got {self.window}")
        if min(self.sigma, self.k1, self.k2, self.dynamic_range) <= 0:
            raise ValueError("sigma, k1, k2 and dynamic_range must be positive")


def iou(pred, gt):
    """Intersection over union of two binary masks; empty vs empty is 1.0."""
    pred = validate_binary_mask(pred, "pred")
    gt = validate_binary_mask(gt, "gt")
    if pred.shape != gt.shape:
        raise ValueError(f"mask shapes differ: {pred.shape} vs {gt.shape}")
    union = int(np.sum(pred | gt))
    if union == 0:
        return 1.0
    return float(np.sum(pred & gt)) / union


def miou(pairs):
    """Arithmetic mean of iou over (pred, gt) pairs."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("miou needs at least one pair")
    return sum(iou(p, g) for p, g in pairs) / len(pairs)


def luminance(img):
    """Rec. 601 luminance of an RGB image; gray images pass through."""
    img = validate_image(img)
    if img.ndim == 2:
        return img
    return img @ _LUMA


def _gaussian_window(window, sigma):
    half = window // 2
    x = np.arange(-half, half + 1, dtype=np.float64)
    g = np.exp(-(x * x) / (2.0 * sigma * sigma))
    g /= g.sum()
    return np.outer(g, g)


def ssim(a, b, params=None):
    """Mean structural similarity between two images.

    Images are converted to luminance, scored with Gaussian-weighted local
    windows, and averaged over the region where the window fits entirely.
    """
    params = params or SsimParams()
    a = luminance(a)
    b = luminance(b)
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")
    if min(a.shape) < params.window:
        raise ValueError(
            f"images must be at least {params.window} px per side, got {a.shape}"
        )
    win = _gaussian_window(params.window, params.sigma)
    c1 = (params.k1 * params.dynamic_range) ** 2
    c2 = (params.k2 * params.dynamic_range) ** 2

    def smooth(x):
        return ndimage.correlate(x, win, mode="constant")

    mu_a = smooth(a)
    mu_b = smooth(b)
    var_a = smooth(a * a) - mu_a * mu_a
    var_b = smooth(b * b) - mu_b * mu_b
    cov = smooth(a * b) - mu_a * mu_b
    num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    smap = num / den
    pad = params.window // 2
    return float(np.mean(smap[pad:-pad, pad:-pad]))
