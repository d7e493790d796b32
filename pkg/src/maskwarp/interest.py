"""Interest-consistency regularizer over detector heads.

Compares the raw interest-point head (65 channels per cell) and descriptor
head (256 channels per cell) of an image before and after stylization: a
squared-l2 point loss plus a hinge descriptor loss over cell pairs related
by a homography-induced correspondence. Heads are produced externally and
exchanged through the SPHD binary format.
"""

import struct
from dataclasses import dataclass, field as dataclass_field

import numpy as np

__all__ = [
    "InterestHeads",
    "IRParams",
    "point_loss",
    "correspondence_grid",
    "descriptor_loss",
    "ir_loss",
    "ictt_total",
    "read_sphd",
    "write_sphd",
]

SPHD_MAGIC = b"SPHD"
SPHD_VERSION = 1


def _identity_homography():
    return np.eye(3, dtype=np.float64)


@dataclass
class InterestHeads:
    """Detector outputs on a coarse cell grid (channel-last)."""

    point_head: np.ndarray
    desc_head: np.ndarray
    cell_size: int = 8

    def __post_init__(self):
        self.point_head = np.asarray(self.point_head, dtype=np.float64)
        self.desc_head = np.asarray(self.desc_head, dtype=np.float64)
        if self.point_head.ndim != 3 or self.desc_head.ndim != 3:
            raise ValueError("heads must be (hc, wc, channels) arrays")
        if self.point_head.shape[:2] != self.desc_head.shape[:2]:
            raise ValueError(
                f"head grids differ: {self.point_head.shape[:2]} vs "
                f"{self.desc_head.shape[:2]}"
            )
        if not np.isfinite(self.point_head).all() or not np.isfinite(self.desc_head).all():
            raise ValueError("heads must be finite")
        if self.cell_size < 1:
            raise ValueError("cell_size must be positive")

    @property
    def grid(self):
        return self.point_head.shape[:2]


@dataclass
class IRParams:
    """Weights and margins of the interest regularizer.

    lam scales the descriptor part; beta_d re-balances the positive hinge
    (the descriptor-loss weighting of the detector this loss family comes
    from, not a fitted value here). tau is the correspondence radius in
    pixels.
    """

    lam: float = 0.00005
    mu: float = 1.0
    m_p: float = 1.0
    m_n: float = 0.2
    beta_d: float = 250.0
    tau: float = 8.0
    homography: np.ndarray = dataclass_field(default_factory=_identity_homography)

    def __post_init__(self):
        self.homography = np.asarray(self.homography, dtype=np.float64)
        if not (self.m_p > self.m_n >= 0):
            raise ValueError(f"need m_p > m_n >= 0, got {self.m_p}, {self.m_n}")
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.homography.shape != (3, 3):
            raise ValueError("homography must be 3x3")
        if abs(np.linalg.det(self.homography)) < 1e-12:
            raise ValueError("homography is not invertible")


def point_loss(p_n, p_o):
    """Mean squared l2 distance between point-head cells."""
    p_n = np.asarray(p_n, dtype=np.float64)
    p_o = np.asarray(p_o, dtype=np.float64)
    if p_n.shape != p_o.shape or p_n.ndim != 3:
        raise ValueError(f"point heads differ in shape: {p_n.shape} vs {p_o.shape}")
    diff = p_n - p_o
    hc, wc = p_n.shape[:2]
    return float(np.sum(diff * diff) / (hc * wc))


def correspondence_grid(hc, wc, homography=None, cell_size=8, tau=8.0):
    """Boolean grid g[h, w, i, j]: cell (h, w) corresponds to cell (i, j).

    True iff the homography projection of (h, w)'s center pixel lands
    within tau pixels of (i, j)'s center. Centers sit at
    (col * cell_size + cell_size/2, row * cell_size + cell_size/2).
    """
    homography = (
        _identity_homography() if homography is None else np.asarray(homography, float)
    )
    if homography.shape != (3, 3) or abs(np.linalg.det(homography)) < 1e-12:
        raise ValueError("homography must be an invertible 3x3 matrix")
    rows = np.arange(hc, dtype=np.float64)
    cols = np.arange(wc, dtype=np.float64)
    cx = cols * cell_size + cell_size / 2.0
    cy = rows * cell_size + cell_size / 2.0
    xx, yy = np.meshgrid(cx, cy)  # (hc, wc)
    pts = np.stack([xx.ravel(), yy.ravel(), np.ones(xx.size)], axis=0)
    proj = homography @ pts
    with np.errstate(divide="ignore", invalid="ignore"):
        px = proj[0] / proj[2]
        py = proj[1] / proj[2]
    px = px.reshape(hc, wc)
    py = py.reshape(hc, wc)
    dx = px[:, :, None, None] - xx[None, None, :, :]
    dy = py[:, :, None, None] - yy[None, None, :, :]
    dist2 = dx * dx + dy * dy
    grid = np.isfinite(dist2) & (dist2 <= tau * tau)
    return grid


def descriptor_loss(d_n, d_o, g, params=None):
    """Hinge loss over all cell pairs, positives weighted by beta_d.

    Positive pairs (g true) are pushed to dot >= m_p, negatives to
    dot <= m_n; the sum is normalized by the squared cell count.
    """
    params = params or IRParams()
    d_n = np.asarray(d_n, dtype=np.float64)
    d_o = np.asarray(d_o, dtype=np.float64)
    if d_n.shape != d_o.shape or d_n.ndim != 3:
        raise ValueError(f"descriptor heads differ in shape: {d_n.shape} vs {d_o.shape}")
    hc, wc = d_n.shape[:2]
    g = np.asarray(g)
    if g.shape != (hc, wc, hc, wc):
        raise ValueError(f"correspondence grid shape {g.shape} does not match heads")
    dots = np.einsum("hwc,ijc->hwij", d_n, d_o)
    pos = np.maximum(0.0, params.m_p - dots)
    neg = np.maximum(0.0, dots - params.m_n)
    gf = g.astype(np.float64)
    total = params.beta_d * np.sum(gf * pos) + np.sum((1.0 - gf) * neg)
    return float(total / (hc * wc) ** 2)


def ir_loss(heads_n, heads_o, params=None):
    """Combined interest regularizer.

    Returns (total, point_part, desc_part) with
    total = point_part + lam * desc_part; the correspondence grid comes
    from the params' homography on the heads' cell grid.
    """
    params = params or IRParams()
    if heads_n.grid != heads_o.grid:
        raise ValueError(f"head grids differ: {heads_n.grid} vs {heads_o.grid}")
    if heads_n.cell_size != heads_o.cell_size:
        raise ValueError("cell sizes differ")
    hc, wc = heads_n.grid
    p_part = point_loss(heads_n.point_head, heads_o.point_head)
    g = correspondence_grid(hc, wc, params.homography, heads_n.cell_size, params.tau)
    d_part = descriptor_loss(heads_n.desc_head, heads_o.desc_head, g, params)
    return p_part + params.lam * d_part, p_part, d_part


def ictt_total(nst_loss, heads_n, heads_o, params=None):
    """Combined stylization objective: an externally computed style-transfer
    loss plus the mu-weighted interest regularizer.

    The style-transfer term is whatever scalar the caller's stylization
    method reports; only the regularizer is computed here. Returns
    (total, nst_loss, ir_total).
    """
    params = params or IRParams()
    nst_loss = float(nst_loss)
    if not np.isfinite(nst_loss):
        raise ValueError("nst_loss must be finite")
    ir_total, _, _ = ir_loss(heads_n, heads_o, params)
    return nst_loss + params.mu * ir_total, nst_loss, ir_total


def write_sphd(heads, path):
    """Serialize heads to the SPHD binary format (little-endian f32)."""
    hc, wc = heads.grid
    cp = heads.point_head.shape[2]
    cd = heads.desc_head.shape[2]
    with open(path, "wb") as fh:
        fh.write(SPHD_MAGIC)
        fh.write(struct.pack("<IIIIII", SPHD_VERSION, hc, wc, cp, cd, heads.cell_size))
        fh.write(heads.point_head.astype("<f4").tobytes(order="C"))
        fh.write(heads.desc_head.astype("<f4").tobytes(order="C"))


def read_sphd(path):
    """Read an SPHD heads file into an InterestHeads (float64)."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != SPHD_MAGIC:
            raise ValueError(f"{path}: not an SPHD file (magic {magic!r})")
        version, hc, wc, cp, cd, cell = struct.unpack("<IIIIII", fh.read(24))
        if version != SPHD_VERSION:
            raise ValueError(f"{path}: unsupported SPHD version {version}")
        n_point = hc * wc * cp
        n_desc = hc * wc * cd
        data = fh.read((n_point + n_desc) * 4)
        if len(data) != (n_point + n_desc) * 4:
            raise ValueError(f"{path}: truncated SPHD payload")
        if fh.read(1):
            raise ValueError(f"{path}: trailing bytes after SPHD payload")
    flat = np.frombuffer(data, dtype="<f4")
    point = flat[:n_point].reshape(hc, wc, cp).astype(np.float64)
    desc = flat[n_point:].reshape(hc, wc, cd).astype(np.float64)
    return InterestHeads(point_head=point, desc_head=desc, cell_size=cell)
