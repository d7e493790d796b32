import numpy as np
import pytest
from numpy.testing import assert_array_equal, assert_allclose

from maskwarp import binarize, edge_band, mask_logic, smoothness_mask, soften
from oracles import edge_band_brute, gaussian_kernel_1d, smoothness_mask_truth_table


class TestMaskLogic:
    def test_xor_self_is_zero(self):
        m = np.ones((4, 5), dtype=np.uint8)
        assert_array_equal(mask_logic(m, m, "XOR"), np.zeros((4, 5), np.uint8))

    def test_and_with_ones_is_identity(self, rng):
        m = (rng.random((6, 6)) > 0.5).astype(np.uint8)
        assert_array_equal(mask_logic(m, np.ones_like(m), "AND"), m)

    def test_or_example(self):
        a = np.array([[1, 0], [1, 1]], dtype=np.uint8)
        b = np.array([[0, 1], [0, 0]], dtype=np.uint8)
        assert_array_equal(mask_logic(a, b, "OR"), np.ones((2, 2), np.uint8))

    def test_not_ignores_b(self):
        a = np.array([[1, 0]], dtype=np.uint8)
        assert_array_equal(mask_logic(a, None, "NOT"), np.array([[0, 1]], np.uint8))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            mask_logic(np.ones((2, 2), np.uint8), np.ones((3, 2), np.uint8), "AND")

    def test_unknown_op(self):
        m = np.ones((2, 2), np.uint8)
        with pytest.raises(ValueError):
            mask_logic(m, m, "NAND")

    def test_non_binary_rejected(self):
        with pytest.raises(ValueError):
            mask_logic(np.full((2, 2), 3), np.ones((2, 2), np.uint8), "AND")


class TestEdgeBand:
    def test_all_zero_mask(self):
        assert edge_band(np.zeros((8, 8), np.uint8), 3).sum() == 0

    def test_single_pixel_grid(self):
        band = edge_band(np.ones((1, 1), np.uint8), 3)
        assert_array_equal(band, np.ones((1, 1), np.uint8))

    def test_centered_square_matches_bruteforce(self):
        m = np.zeros((7, 7), dtype=np.uint8)
        m[2:5, 2:5] = 1
        assert_array_equal(edge_band(m, 3), edge_band_brute(m, 3))

    @pytest.mark.parametrize("k", [3, 5, 9])
    def test_random_masks_match_bruteforce(self, rng, k):
        m = (rng.random((20, 17)) > 0.6).astype(np.uint8)
        assert_array_equal(edge_band(m, k), edge_band_brute(m, k))

    def test_band_pixels_see_both_sides(self, rng):
        # every band pixel has an inside and an outside pixel within
        # Chebyshev radius (k-1)/2
        k = 5
        m = (rng.random((24, 24)) > 0.5).astype(np.uint8)
        band = edge_band(m, k)
        half = (k - 1) // 2
        padded = np.pad(m, half, mode="constant")
        for i, j in zip(*np.nonzero(band)):
            window = padded[i : i + k, j : j + k]
            assert window.min() == 0 and window.max() == 1

    @pytest.mark.parametrize("k", [2, 1, -3, 0])
    def test_bad_kernel(self, k):
        with pytest.raises(ValueError):
            edge_band(np.ones((4, 4), np.uint8), k)


class TestSmoothnessMask:
    def test_equal_masks_reduce_to_edge_band_inside(self):
        m = np.zeros((16, 16), dtype=np.uint8)
        m[4:12, 4:12] = 1
        got = smoothness_mask(m, m, 3)
        expected = mask_logic(edge_band(m, 3), m, "AND")
        assert_array_equal(got, expected)

    def test_empty_source_gives_target(self, rng):
        m_t = (rng.random((12, 12)) > 0.5).astype(np.uint8)
        got = smoothness_mask(np.zeros_like(m_t), m_t, 3)
        assert_array_equal(got, m_t)

    def test_truth_table_cases(self):
        # all 8 (edge, s, t) combinations, checked against the formula
        cases = {
            (1, 1, 0): 1, (0, 0, 1): 1, (0, 1, 1): 0, (1, 1, 1): 1,
            (0, 1, 0): 0, (1, 0, 1): 1, (1, 0, 0): 0, (0, 0, 0): 0,
        }
        for (e, s, t), want in cases.items():
            assert smoothness_mask_truth_table(e, s, t) == want

    def test_matches_truth_table_on_random_masks(self, rng):
        m_s = (rng.random((32, 32)) > 0.5).astype(np.uint8)
        m_t = (rng.random((32, 32)) > 0.5).astype(np.uint8)
        k = 5
        band = edge_band(m_t, k)
        got = smoothness_mask(m_s, m_t, k)
        want = smoothness_mask_truth_table(band, m_s, m_t)
        assert_array_equal(got, want)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            smoothness_mask(np.ones((4, 4), np.uint8), np.ones((5, 4), np.uint8))


class TestSoften:
    def test_sigma_zero_is_identity(self, rng):
        m = (rng.random((9, 9)) > 0.5).astype(np.uint8)
        out = soften(m, 0.0)
        assert out.dtype == np.float64
        assert_array_equal(out, m.astype(np.float64))

    def test_all_ones_stays_ones(self):
        out = soften(np.ones((15, 15), np.uint8), 2.5)
        assert out.max() <= 1.0
        assert_allclose(out, 1.0, atol=1e-12)

    def test_impulse_matches_discrete_gaussian(self):
        m = np.zeros((9, 9), dtype=np.uint8)
        m[4, 4] = 1
        out = soften(m, 1.0)
        k = gaussian_kernel_1d(1.0, 4)
        expected = np.outer(k, k)
        assert_allclose(out, expected, atol=1e-12)
        assert out.argmax() == 4 * 9 + 4

    def test_binarize_round_trip_at_zero_sigma(self, rng):
        m = (rng.random((11, 13)) > 0.4).astype(np.uint8)
        assert_array_equal(binarize(soften(m, 0.0)), m)

    def test_negative_sigma(self):
        with pytest.raises(ValueError):
            soften(np.ones((3, 3), np.uint8), -1.0)
