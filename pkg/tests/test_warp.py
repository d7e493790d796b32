import numpy as np
import pytest
from numpy.testing import assert_array_equal, assert_allclose

from maskwarp import (
    downsample_field,
    read_wfld,
    upsample_field,
    warp_apply,
    write_wfld,
    zero_field,
)
from conftest import random_field
from oracles import upsample_field_brute, warp_apply_brute


class TestWarpApply:
    def test_zero_field_is_bitexact_identity(self, rng):
        img = rng.random((13, 17))
        out = warp_apply(zero_field(13, 17), img)
        assert_array_equal(out, img)

    def test_zero_field_identity_rgb(self, rng):
        img = rng.random((8, 9, 3))
        assert_array_equal(warp_apply(zero_field(8, 9), img), img)

    def test_integer_shift_no_blur(self):
        img = np.arange(20, dtype=np.float64).reshape(4, 5) / 19.0
        fld = zero_field(4, 5)
        fld[:, :, 0] = 1.0  # sample one column to the right
        out = warp_apply(fld, img)
        expected = np.zeros_like(img)
        expected[:, :-1] = img[:, 1:]
        assert_array_equal(out, expected)

    @pytest.mark.parametrize("dx,dy", [(2, 0), (0, -1), (-3, 2)])
    def test_integer_constant_field_equals_array_shift(self, rng, dx, dy):
        img = rng.random((10, 12))
        fld = zero_field(10, 12)
        fld[:, :, 0] = dx
        fld[:, :, 1] = dy
        out = warp_apply(fld, img)
        expected = np.zeros_like(img)
        src_y = slice(max(0, dy), min(10, 10 + dy))
        src_x = slice(max(0, dx), min(12, 12 + dx))
        dst_y = slice(max(0, -dy), min(10, 10 - dy))
        dst_x = slice(max(0, -dx), min(12, 12 - dx))
        expected[dst_y, dst_x] = img[src_y, src_x]
        assert_array_equal(out, expected)

    def test_half_pixel_ramp(self):
        w = 8
        img = np.tile(np.arange(w, dtype=np.float64) / (w - 1), (5, 1))
        fld = zero_field(5, w)
        fld[:, :, 0] = 0.5
        out = warp_apply(fld, img)
        expected = (np.arange(w - 1) + 0.5) / (w - 1)
        assert_allclose(out[:, : w - 1], np.tile(expected, (5, 1)), atol=1e-12)

    def test_matches_bruteforce_on_random_input(self, rng):
        img = rng.random((9, 11))
        fld = random_field(rng, 9, 11, scale=3.0)
        assert_allclose(warp_apply(fld, img), warp_apply_brute(fld, img), atol=1e-12)

    def test_linearity_in_input(self, rng):
        fld = random_field(rng, 12, 12)
        x = rng.random((12, 12))
        y = rng.random((12, 12))
        a, b = 0.7, -0.3
        lhs = warp_apply(fld, a * x + b * y)
        rhs = a * warp_apply(fld, x) + b * warp_apply(fld, y)
        assert_allclose(lhs, rhs, atol=1e-6)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            warp_apply(zero_field(4, 4), np.ones((5, 4)))

    def test_non_finite_field_rejected(self):
        fld = zero_field(3, 3)
        fld[1, 1, 0] = np.nan
        with pytest.raises(ValueError):
            warp_apply(fld, np.ones((3, 3)))


class TestUpsampleField:
    def test_zero_field(self):
        out = upsample_field(zero_field(3, 4), 2)
        assert out.shape == (6, 8, 2)
        assert_array_equal(out, np.zeros((6, 8, 2)))

    def test_constant_field_scaling_law(self):
        fld = zero_field(5, 5)
        fld[:, :, 0] = 2.0
        fld[:, :, 1] = -1.0
        out = upsample_field(fld, 2)
        assert_allclose(out[:, :, 0], 4.0, atol=1e-12)
        assert_allclose(out[:, :, 1], -2.0, atol=1e-12)

    def test_distinct_corners_match_bruteforce(self):
        fld = np.array(
            [[[1.0, -2.0], [3.0, 0.5]], [[-1.5, 2.0], [0.0, 4.0]]], dtype=np.float64
        )
        assert_allclose(upsample_field(fld, 2), upsample_field_brute(fld, 2), atol=1e-12)

    def test_random_matches_bruteforce(self, rng):
        fld = random_field(rng, 4, 5)
        for factor in (2, 3):
            assert_allclose(
                upsample_field(fld, factor),
                upsample_field_brute(fld, factor),
                atol=1e-12,
            )

    @pytest.mark.parametrize("factor", [1, 0, 2.5])
    def test_bad_factor(self, factor):
        with pytest.raises(ValueError):
            upsample_field(zero_field(2, 2), factor)


class TestDownsampleField:
    def test_inverse_of_constant_upsample(self):
        fld = zero_field(4, 4)
        fld[:, :, 0] = 3.0
        up = upsample_field(fld, 2)
        back = downsample_field(up, 2)
        assert_allclose(back, fld, atol=1e-12)

    def test_non_divisible_pads_edges(self):
        fld = np.ones((5, 5, 2))
        out = downsample_field(fld, 2)
        assert out.shape == (3, 3, 2)
        assert_allclose(out, 0.5, atol=1e-12)  # displacement scaled by 1/2


class TestWfldFormat:
    def test_round_trip_bit_exact(self, rng, tmp_path):
        fld = random_field(rng, 6, 7).astype(np.float32).astype(np.float64)
        path = tmp_path / "field.wfld"
        write_wfld(fld, path)
        loaded = read_wfld(path)
        assert_array_equal(loaded, fld)
        path2 = tmp_path / "field2.wfld"
        write_wfld(loaded, path2)
        assert path.read_bytes() == path2.read_bytes()

    def test_header_layout(self, tmp_path):
        path = tmp_path / "f.wfld"
        write_wfld(zero_field(2, 3), path)
        blob = path.read_bytes()
        assert blob[:4] == b"WFLD"
        assert int.from_bytes(blob[4:8], "little") == 1
        assert int.from_bytes(blob[8:12], "little") == 2
        assert int.from_bytes(blob[12:16], "little") == 3
        assert len(blob) == 16 + 2 * 3 * 2 * 4

    def test_rejects_bad_magic(self, tmp_path):
        path = tmp_path / "bad.wfld"
        path.write_bytes(b"NOPE" + b"\x00" * 20)
        with pytest.raises(ValueError):
            read_wfld(path)

    def test_rejects_truncated(self, tmp_path):
        path = tmp_path / "f.wfld"
        write_wfld(zero_field(4, 4), path)
        path.write_bytes(path.read_bytes()[:-5])
        with pytest.raises(ValueError):
            read_wfld(path)
