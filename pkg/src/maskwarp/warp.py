"""Dense displacement fields and backward bilinear warping.

A warp field is an (H, W, 2) float array; [..., 0] is dx (pixels rightward)
and [..., 1] is dy (pixels downward). Warping is backward: output pixel
(i, j) bilinearly samples the input at (j + dx, i + dy). Samples falling
outside the grid contribute 0, the background value of masks.
"""

import struct

import numpy as np

__all__ = [
    "validate_field",
    "zero_field",
    "warp_apply",
    "bilinear_sample",
    "bilinear_sample_grad",
    "upsample_field",
    "downsample_field",
    "read_wfld",
    "write_wfld",
]

WFLD_MAGIC = b"WFLD"
WFLD_VERSION = 1


def validate_field(field, name="field"):
    """Check an (H, W, 2) finite float field, return float64."""
    field = np.asarray(field, dtype=np.float64)
    if field.ndim != 3 or field.shape[2] != 2:
        raise ValueError(f"{name} must have shape (H, W, 2), got {field.shape}")
    if not np.isfinite(field).all():
        raise ValueError(f"{name} contains non-finite displacements")
    return field


def zero_field(height, width):
    return np.zeros((height, width, 2), dtype=np.float64)


def _sample_coords(field):
    h, w = field.shape[:2]
    xs = np.arange(w, dtype=np.float64)[None, :] + field[:, :, 0]
    ys = np.arange(h, dtype=np.float64)[:, None] + field[:, :, 1]
    return xs, ys


def bilinear_sample(image, xs, ys):
    """Bilinearly sample `image` at float coords (xs, ys); outside -> 0.

    image may be (H, W) or (H, W, C); xs/ys share an arbitrary common shape
    and index columns/rows respectively.
    """
    image = np.asarray(image, dtype=np.float64)
    h, w = image.shape[:2]
    x0 = np.floor(xs)
    y0 = np.floor(ys)
    fx = xs - x0
    fy = ys - y0
    x0 = x0.astype(np.int64)
    y0 = y0.astype(np.int64)

    chans = image.ndim == 3
    out = None
    for dy, wy in ((0, 1.0 - fy), (1, fy)):
        for dx, wx in ((0, 1.0 - fx), (1, fx)):
            xi = x0 + dx
            yi = y0 + dy
            inside = (xi >= 0) & (xi < w) & (yi >= 0) & (yi < h)
            vals = image[np.clip(yi, 0, h - 1), np.clip(xi, 0, w - 1)]
            weight = wy * wx * inside
            term = vals * (weight[..., None] if chans else weight)
            out = term if out is None else out + term
    return out


def bilinear_sample_grad(image, xs, ys):
    """Partial derivatives of bilinear_sample w.r.t. the sample coords.

    Returns (d/dx, d/dy), same shape as the sampled output. At integer
    coordinates the derivative of the cell to the right/below is used.
    """
    image = np.asarray(image, dtype=np.float64)
    h, w = image.shape[:2]
    x0 = np.floor(xs).astype(np.int64)
    y0 = np.floor(ys).astype(np.int64)
    fx = xs - x0
    fy = ys - y0

    def at(yi, xi):
        inside = (xi >= 0) & (xi < w) & (yi >= 0) & (yi < h)
        vals = image[np.clip(yi, 0, h - 1), np.clip(xi, 0, w - 1)]
        if image.ndim == 3:
            return vals * inside[..., None]
        return vals * inside

    v00 = at(y0, x0)
    v01 = at(y0, x0 + 1)
    v10 = at(y0 + 1, x0)
    v11 = at(y0 + 1, x0 + 1)
    if image.ndim == 3:
        fx = fx[..., None]
        fy = fy[..., None]
    dx = (1.0 - fy) * (v01 - v00) + fy * (v11 - v10)
    dy = (1.0 - fx) * (v10 - v00) + fx * (v11 - v01)
    return dx, dy


def warp_apply(field, image):
    """Backward-warp an image or soft mask by a displacement field.

    output(i, j) = bilinear sample of image at (j + dx(i,j), i + dy(i,j));
    out-of-grid samples contribute 0.
    """
    field = validate_field(field)
    image = np.asarray(image, dtype=np.float64)
    if image.shape[:2] != field.shape[:2]:
        raise ValueError(
            f"field {field.shape[:2]} and input {image.shape[:2]} dimensions differ"
        )
    xs, ys = _sample_coords(field)
    return bilinear_sample(image, xs, ys)


def _resize_bilinear(plane, out_h, out_w):
    """Bilinear resize with half-pixel centers and edge clamping."""
    in_h, in_w = plane.shape
    xs = (np.arange(out_w, dtype=np.float64) + 0.5) * (in_w / out_w) - 0.5
    ys = (np.arange(out_h, dtype=np.float64) + 0.5) * (in_h / out_h) - 0.5
    xs = np.clip(xs, 0, in_w - 1)
    ys = np.clip(ys, 0, in_h - 1)
    x0 = np.floor(xs).astype(np.int64)
    y0 = np.floor(ys).astype(np.int64)
    x1 = np.minimum(x0 + 1, in_w - 1)
    y1 = np.minimum(y0 + 1, in_h - 1)
    fx = (xs - x0)[None, :]
    fy = (ys - y0)[:, None]
    top = plane[np.ix_(y0, x0)] * (1 - fx) + plane[np.ix_(y0, x1)] * fx
    bot = plane[np.ix_(y1, x0)] * (1 - fx) + plane[np.ix_(y1, x1)] * fx
    return top * (1 - fy) + bot * fy


def upsample_field(field, factor):
    """Upsample a field by an integer factor >= 2.

    Both components are bilinearly interpolated (half-pixel alignment,
    clamped borders) and displacement magnitudes are multiplied by the
    factor so they stay meaningful at the finer resolution.
    """
    if int(factor) != factor or factor < 2:
        raise ValueError(f"factor must be an integer >= 2, got {factor}")
    field = validate_field(field)
    factor = int(factor)
    h, w = field.shape[:2]
    out = np.empty((h * factor, w * factor, 2), dtype=np.float64)
    for c in range(2):
        out[:, :, c] = _resize_bilinear(field[:, :, c], h * factor, w * factor) * factor
    return out


def downsample_field(field, factor):
    """Block-average a field by an integer factor, scaling displacements down.

    Non-divisible sizes are edge-padded before averaging; the result covers
    ceil(H/factor) x ceil(W/factor).
    """
    if int(factor) != factor or factor < 1:
        raise ValueError(f"factor must be a positive integer, got {factor}")
    field = validate_field(field)
    factor = int(factor)
    if factor == 1:
        return field.copy()
    h, w = field.shape[:2]
    ph = (-h) % factor
    pw = (-w) % factor
    if ph or pw:
        field = np.pad(field, ((0, ph), (0, pw), (0, 0)), mode="edge")
    hh, ww = field.shape[0] // factor, field.shape[1] // factor
    blocks = field.reshape(hh, factor, ww, factor, 2)
    return blocks.mean(axis=(1, 3)) / factor


def block_mean(arr, factor):
    """Mean over factor-by-factor blocks of a 2-D or (H, W, C) array.

    Non-divisible sizes are zero-padded (background) on the bottom/right;
    the result covers ceil(H/factor) x ceil(W/factor).
    """
    if int(factor) != factor or factor < 1:
        raise ValueError(f"factor must be a positive integer, got {factor}")
    arr = np.asarray(arr, dtype=np.float64)
    factor = int(factor)
    if factor == 1:
        return arr.copy()
    h, w = arr.shape[:2]
    ph = (-h) % factor
    pw = (-w) % factor
    if ph or pw:
        pad = ((0, ph), (0, pw)) + ((0, 0),) * (arr.ndim - 2)
        arr = np.pad(arr, pad, mode="constant")
    hh, ww = arr.shape[0] // factor, arr.shape[1] // factor
    shape = (hh, factor, ww, factor) + arr.shape[2:]
    return arr.reshape(shape).mean(axis=(1, 3))


def write_wfld(field, path):
    """Serialize a field to the WFLD binary format (little-endian f32)."""
    field = validate_field(field)
    h, w = field.shape[:2]
    with open(path, "wb") as fh:
        fh.write(WFLD_MAGIC)
        fh.write(struct.pack("<III", WFLD_VERSION, h, w))
        fh.write(field.astype("<f4").tobytes(order="C"))


def read_wfld(path):
    """Read a WFLD file back into an (H, W, 2) float64 field."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != WFLD_MAGIC:
            raise ValueError(f"{path}: not a WFLD file (magic {magic!r})")
        version, h, w = struct.unpack("<III", fh.read(12))
        if version != WFLD_VERSION:
            raise ValueError(f"{path}: unsupported WFLD version {version}")
        data = fh.read(h * w * 2 * 4)
        if len(data) != h * w * 2 * 4:
            raise ValueError(f"{path}: truncated WFLD payload")
        extra = fh.read(1)
        if extra:
            raise ValueError(f"{path}: trailing bytes after WFLD payload")
    disp = np.frombuffer(data, dtype="<f4").reshape(h, w, 2)
    return disp.astype(np.float64)
