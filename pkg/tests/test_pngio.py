import numpy as np
import pytest
from numpy.testing import assert_array_equal, assert_allclose
from PIL import Image

from maskwarp import load_image, load_label_mask, load_mask, save_image, save_mask


def test_gray_round_trip(tmp_path, rng):
    img = np.round(rng.random((9, 7)) * 255) / 255.0
    p = tmp_path / "g.png"
    save_image(img, p)
    assert_allclose(load_image(p), img, atol=1e-12)


def test_rgb_round_trip(tmp_path, rng):
    img = np.round(rng.random((6, 5, 3)) * 255) / 255.0
    p = tmp_path / "c.png"
    save_image(img, p)
    assert_allclose(load_image(p), img, atol=1e-12)


def test_mask_threshold_at_128(tmp_path):
    arr = np.array([[0, 127, 128, 255]], dtype=np.uint8)
    p = tmp_path / "m.png"
    Image.fromarray(arr, mode="L").save(p)
    assert_array_equal(load_mask(p), np.array([[0, 0, 1, 1]], np.uint8))


def test_mask_round_trip(tmp_path, rng):
    m = (rng.random((12, 12)) > 0.5).astype(np.uint8)
    p = tmp_path / "m.png"
    save_mask(m, p)
    assert_array_equal(load_mask(p), m)


def test_label_mask_color_table(tmp_path):
    rgb = np.zeros((4, 4, 3), dtype=np.uint8)
    rgb[0, :] = (255, 0, 0)
    rgb[1, :] = (0, 255, 0)
    p = tmp_path / "labels.png"
    Image.fromarray(rgb, mode="RGB").save(p)
    labels = load_label_mask(p, {"1": (255, 0, 0), 2: (0, 255, 0)})
    want = np.zeros((4, 4), dtype=np.int32)
    want[0, :] = 1
    want[1, :] = 2
    assert_array_equal(labels, want)


def test_label_mask_from_indexed_png(tmp_path):
    # palette-mode PNGs decode through their RGB colors
    rgb = np.zeros((3, 3, 3), dtype=np.uint8)
    rgb[1] = (10, 200, 30)
    img = Image.fromarray(rgb, mode="RGB").convert("P", palette=Image.ADAPTIVE)
    p = tmp_path / "indexed.png"
    img.save(p)
    labels = load_label_mask(p, {5: (10, 200, 30)})
    want = np.zeros((3, 3), dtype=np.int32)
    want[1] = 5
    assert_array_equal(labels, want)


def test_label_mask_rejects_nonpositive_label(tmp_path):
    rgb = np.zeros((2, 2, 3), dtype=np.uint8)
    p = tmp_path / "l.png"
    Image.fromarray(rgb, mode="RGB").save(p)
    with pytest.raises(ValueError):
        load_label_mask(p, {0: (0, 0, 0)})


def test_out_of_range_image_rejected(tmp_path):
    with pytest.raises(ValueError):
        save_image(np.full((4, 4), 1.5), tmp_path / "bad.png")
