"""PNG readers/writers for images, binary masks and label masks.

Images are float arrays in [0,1], shape (H, W) for gray or (H, W, 3) for
RGB. Masks read from PNG binarize at gray level >= 128. Label masks come
from color PNGs with an explicit color -> label table.
"""

import numpy as np
from PIL import Image

__all__ = [
    "load_image",
    "save_image",
    "load_mask",
    "save_mask",
    "load_label_mask",
    "validate_image",
]


def validate_image(img, name="image"):
    """Check an (H,W) or (H,W,3) float image in [0,1], return float64."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 3 and img.shape[2] == 1:
        img = img[:, :, 0]
    if img.ndim not in (2, 3) or (img.ndim == 3 and img.shape[2] != 3):
        raise ValueError(f"{name} must be (H,W) or (H,W,3), got {img.shape}")
    if img.size and (img.min() < 0.0 or img.max() > 1.0):
        raise ValueError(f"{name} values must lie in [0,1]")
    return img


def load_image(path):
    """Load an 8-bit gray or RGB PNG as floats in [0,1]."""
    with Image.open(path) as im:
        if im.mode in ("L", "I;16", "I"):
            arr = np.asarray(im.convert("L"), dtype=np.float64)
            return arr / 255.0
        arr = np.asarray(im.convert("RGB"), dtype=np.float64)
    return arr / 255.0


def save_image(img, path):
    """Write a [0,1] float image as 8-bit gray or RGB PNG."""
    img = validate_image(img)
    data = np.rint(np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8)
    mode = "L" if data.ndim == 2 else "RGB"
    Image.fromarray(data, mode=mode).save(path)


def load_mask(path):
    """Load a PNG as a binary mask: gray level >= 128 maps to 1."""
    with Image.open(path) as im:
        arr = np.asarray(im.convert("L"))
    return (arr >= 128).astype(np.uint8)


def save_mask(mask, path):
    """Write a {0,1} mask as an 8-bit gray PNG (1 -> 255)."""
    mask = np.asarray(mask)
    Image.fromarray((mask.astype(np.uint8) * 255), mode="L").save(path)


def load_label_mask(path, color_table):
    """Load a color PNG as an integer label map.

    color_table maps label -> (r, g, b). Pixels matching no table entry get
    background label 0. Labels must be positive integers.

    Returns an int32 array of shape (H, W).
    """
    with Image.open(path) as im:
        rgb = np.asarray(im.convert("RGB"))
    labels = np.zeros(rgb.shape[:2], dtype=np.int32)
    for label, color in color_table.items():
        label = int(label)
        if label <= 0:
            raise ValueError(f"labels must be positive, got {label}")
        color = np.asarray(color, dtype=np.uint8)
        if color.shape != (3,):
            raise ValueError(f"color for label {label} must be (r,g,b)")
        hit = np.all(rgb == color[None, None, :], axis=2)
        labels[hit] = label
    return labels
