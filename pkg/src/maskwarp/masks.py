"""Binary/soft mask algebra: logic ops, edge bands, smoothness masks, softening.

Masks are single-channel numpy arrays. A binary mask holds {0,1} (uint8),
a soft mask holds floats in [0,1]. All functions are pure; inputs are never
mutated.
"""

import numpy as np
from scipy import ndimage

__all__ = [
    "validate_binary_mask",
    "validate_soft_mask",
    "binarize",
    "mask_logic",
    "edge_band",
    "smoothness_mask",
    "soften",
]

_LOGIC_OPS = ("AND", "OR", "XOR", "NOT")


def validate_binary_mask(m, name="mask"):
    """Check a 2-D {0,1} array and return it as uint8."""
    m = np.asarray(m)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    if m.size and not np.isin(np.unique(m), (0, 1)).all():
        raise ValueError(f"{name} must contain only 0 and 1")
    return m.astype(np.uint8)


def validate_soft_mask(m, name="mask"):
    """Check a 2-D [0,1] float array and return it as float64."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    if m.size and (m.min() < 0.0 or m.max() > 1.0):
        raise ValueError(f"{name} values must lie in [0,1]")
    return m


def binarize(m, threshold=0.5):
    """Threshold a soft mask to a binary one (value >= threshold -> 1)."""
    m = np.asarray(m, dtype=np.float64)
    return (m >= threshold).astype(np.uint8)


def mask_logic(a, b, op):
    """Pixelwise boolean combination of two binary masks.

    op is one of "AND", "OR", "XOR", "NOT"; "NOT" negates `a` and ignores `b`.
    """
    if op not in _LOGIC_OPS:
        raise ValueError(f"unknown op {op!r}, expected one of {_LOGIC_OPS}")
    a = validate_binary_mask(a, "a")
    if op == "NOT":
        return (1 - a).astype(np.uint8)
    b = validate_binary_mask(b, "b")
    if a.shape != b.shape:
        raise ValueError(f"mask shapes differ: {a.shape} vs {b.shape}")
    if op == "AND":
        out = a & b
    elif op == "OR":
        out = a | b
    else:
        out = a ^ b
    return out.astype(np.uint8)


def edge_band(m, k=9):
    """Extract the edge band of a binary mask with a k-by-k all-ones kernel.

    A pixel belongs to the band iff its k-by-k neighborhood (zero padded, so
    off-image counts as background) contains both inside and outside pixels,
    i.e. the box sum is strictly between 0 and k*k.
    """
    if k % 2 == 0 or k < 3:
        raise ValueError(f"kernel size must be odd and >= 3, got {k}")
    m = validate_binary_mask(m)
    kernel = np.ones((k, k), dtype=np.int64)
    sums = ndimage.correlate(m.astype(np.int64), kernel, mode="constant", cval=0)
    return ((sums > 0) & (sums < k * k)).astype(np.uint8)


def smoothness_mask(m_s, m_t, k=9):
    """Region on which warp-field smoothness is enforced.

    Union of the compression region (target edge band restricted to the
    source object) and the expansion region (target area the source does
    not cover):  (edge_band(m_t, k) & m_s) | ((m_s ^ m_t) & m_t).
    """
    m_s = validate_binary_mask(m_s, "m_s")
    m_t = validate_binary_mask(m_t, "m_t")
    if m_s.shape != m_t.shape:
        raise ValueError(f"mask shapes differ: {m_s.shape} vs {m_t.shape}")
    compress = mask_logic(edge_band(m_t, k), m_s, "AND")
    expand = mask_logic(mask_logic(m_s, m_t, "XOR"), m_t, "AND")
    return mask_logic(compress, expand, "OR")


def soften(m, sigma=2.0):
    """Gaussian-blur a binary mask into a [0,1] soft mask.

    Uses replicate borders so a constant mask stays constant. sigma = 0
    returns the mask unchanged as floats. Soft masks give the warping
    objective usable gradients away from mask edges, where a hard {0,1}
    mask would be flat.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    m = validate_binary_mask(m)
    out = m.astype(np.float64)
    if sigma == 0:
        return out
    out = ndimage.gaussian_filter(out, sigma=sigma, mode="nearest")
    return np.clip(out, 0.0, 1.0)
