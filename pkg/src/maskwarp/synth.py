"""Procedural shapes, textures, and the synthetic warping benchmark pairs.

Everything is deterministic; shapes are generated analytically or from
polygon rasterization, textures from fixed trigonometric patterns.
"""

import numpy as np
from PIL import Image, ImageDraw

__all__ = [
    "disc_mask",
    "ellipse_mask",
    "rect_mask",
    "diamond_mask",
    "star_mask",
    "cross_mask",
    "letter_mask",
    "translate_mask",
    "stripe_texture",
    "checker_texture",
    "textured_image",
    "benchmark_pairs",
]


def _coord_grids(h, w):
    return np.mgrid[0:h, 0:w].astype(np.float64)


def disc_mask(h, w, cy, cx, r):
    yy, xx = _coord_grids(h, w)
    return (((yy - cy) ** 2 + (xx - cx) ** 2) <= r * r).astype(np.uint8)


def ellipse_mask(h, w, cy, cx, ry, rx):
    yy, xx = _coord_grids(h, w)
    return ((((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2) <= 1.0).astype(np.uint8)


def rect_mask(h, w, y0, x0, y1, x1):
    m = np.zeros((h, w), dtype=np.uint8)
    m[y0:y1, x0:x1] = 1
    return m


def diamond_mask(h, w, cy, cx, ry, rx):
    yy, xx = _coord_grids(h, w)
    return ((np.abs(yy - cy) / ry + np.abs(xx - cx) / rx) <= 1.0).astype(np.uint8)


def _polygon_mask(h, w, vertices):
    img = Image.new("L", (w, h), 0)
    ImageDraw.Draw(img).polygon([(float(x), float(y)) for x, y in vertices], fill=1)
    return np.asarray(img, dtype=np.uint8)


def star_mask(h, w, cy, cx, r_outer, r_inner, points=5):
    """Regular star polygon, first point straight up."""
    verts = []
    for i in range(2 * points):
        r = r_outer if i % 2 == 0 else r_inner
        ang = -np.pi / 2 + i * np.pi / points
        verts.append((cx + r * np.cos(ang), cy + r * np.sin(ang)))
    return _polygon_mask(h, w, verts)


def cross_mask(h, w, cy, cx, arm, width):
    half = width // 2
    m = rect_mask(h, w, cy - half, cx - arm, cy + half, cx + arm)
    m |= rect_mask(h, w, cy - arm, cx - half, cy + arm, cx + half)
    return m


def letter_mask(h, w, letter, y0, x0, size, stroke):
    """Block capital letter built from axis-aligned bars."""
    s, t = size, stroke
    bars = {
        "T": [(0, 0, t, s), (0, (s - t) // 2, s, (s - t) // 2 + t)],
        "L": [(0, 0, s, t), (s - t, 0, s, s)],
        "I": [(0, (s - t) // 2, s, (s - t) // 2 + t)],
        "H": [(0, 0, s, t), (0, s - t, s, s), ((s - t) // 2, 0, (s - t) // 2 + t, s)],
        "E": [(0, 0, s, t), (0, 0, t, s), ((s - t) // 2, 0, (s - t) // 2 + t, s - s // 4), (s - t, 0, s, s)],
        "U": [(0, 0, s, t), (0, s - t, s, s), (s - t, 0, s, s)],
    }
    if letter not in bars:
        raise ValueError(f"unsupported letter {letter!r}")
    m = np.zeros((h, w), dtype=np.uint8)
    for by0, bx0, by1, bx1 in bars[letter]:
        m |= rect_mask(h, w, y0 + by0, x0 + bx0, y0 + by1, x0 + bx1)
    return m


def translate_mask(m, dy, dx):
    """Integer-shift a mask with zero fill."""
    out = np.zeros_like(m)
    h, w = m.shape
    ys = slice(max(0, dy), min(h, h + dy))
    xs = slice(max(0, dx), min(w, w + dx))
    ys_src = slice(max(0, -dy), min(h, h - dy))
    xs_src = slice(max(0, -dx), min(w, w - dx))
    out[ys, xs] = m[ys_src, xs_src]
    return out


def stripe_texture(h, w, period=9.0, angle=0.4, lo=0.25, hi=0.95):
    yy, xx = _coord_grids(h, w)
    phase = np.cos(angle) * xx + np.sin(angle) * yy
    vals = 0.5 + 0.5 * np.sin(2.0 * np.pi * phase / period)
    return lo + (hi - lo) * vals


def checker_texture(h, w, cell=8, lo=0.2, hi=0.85):
    yy, xx = _coord_grids(h, w)
    vals = ((yy // cell + xx // cell) % 2).astype(np.float64)
    return lo + (hi - lo) * vals


def textured_image(mask, texture, background=0.05):
    """RGB image carrying `texture` inside the mask over a dark background."""
    m = mask.astype(np.float64)
    img = np.empty(mask.shape + (3,), dtype=np.float64)
    img[:, :, 0] = texture
    img[:, :, 1] = np.roll(texture, 3, axis=1)
    img[:, :, 2] = 1.0 - 0.6 * texture
    return img * m[:, :, None] + background * (1.0 - m[:, :, None])


def benchmark_pairs(size=128):
    """Ten procedurally generated mask pairs with textured source images.

    Covers pure translations, convex/non-convex morphs, and block-letter
    morphs; each entry is a dict with name, src_mask, tgt_mask, src_img,
    tgt_img.
    """
    if size % 128 != 0:
        raise ValueError(f"size must be a multiple of 128, got {size}")
    h = w = size
    c = size // 2
    u = size // 128  # scale unit so shapes grow with size
    sq = rect_mask(h, w, c - 18 * u - 16 * u, c - 18 * u - 8 * u, c + 18 * u - 16 * u, c + 18 * u - 8 * u)
    disc_off = disc_mask(h, w, c - 10 * u, c + 9 * u, 20 * u)
    pairs = [
        ("square_translate", sq, translate_mask(sq, 16 * u, 8 * u)),
        ("disc_translate", disc_off, translate_mask(disc_off, 10 * u, -18 * u)),
        ("disc_to_star", disc_mask(h, w, c, c, 26 * u), star_mask(h, w, c, c, 40 * u, 18 * u)),
        ("disc_to_cross", disc_mask(h, w, c, c, 26 * u), cross_mask(h, w, c, c, 36 * u, 18 * u)),
        ("square_to_u", rect_mask(h, w, c - 24 * u, c - 24 * u, c + 24 * u, c + 24 * u),
         letter_mask(h, w, "U", c - 24 * u, c - 24 * u, 48 * u, 16 * u)),
        ("letter_t_to_l", letter_mask(h, w, "T", c - 24 * u, c - 24 * u, 48 * u, 14 * u),
         letter_mask(h, w, "L", c - 24 * u, c - 24 * u, 48 * u, 14 * u)),
        ("disc_to_square", disc_mask(h, w, c, c, 24 * u),
         rect_mask(h, w, c - 26 * u, c - 26 * u, c + 26 * u, c + 26 * u)),
        ("square_to_disc", rect_mask(h, w, c - 26 * u, c - 26 * u, c + 26 * u, c + 26 * u),
         disc_mask(h, w, c, c, 24 * u)),
        ("ellipse_to_diamond", ellipse_mask(h, w, c, c, 18 * u, 30 * u),
         diamond_mask(h, w, c, c, 30 * u, 22 * u)),
        ("letter_i_to_h", letter_mask(h, w, "I", c - 24 * u, c - 24 * u, 48 * u, 16 * u),
         letter_mask(h, w, "H", c - 24 * u, c - 24 * u, 48 * u, 14 * u)),
    ]
    out = []
    for name, m_s, m_t in pairs:
        src_img = textured_image(m_s, stripe_texture(h, w))
        tgt_img = textured_image(m_t, checker_texture(h, w))
        out.append(
            {
                "name": name,
                "src_mask": m_s,
                "tgt_mask": m_t,
                "src_img": src_img,
                "tgt_img": tgt_img,
            }
        )
    return out
