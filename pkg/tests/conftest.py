import numpy as np
import pytest

from maskwarp import synth


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_soft_mask(rng, h, w, sigma=2.0):
    """Smooth random [0,1] field; smoothness keeps l1 residuals away from
    exact ties so gradient checks stay off the kinks."""
    from scipy.ndimage import gaussian_filter

    noise = gaussian_filter(rng.standard_normal((h, w)), sigma)
    noise -= noise.min()
    peak = noise.max()
    return noise / peak if peak > 0 else noise


def random_field(rng, h, w, scale=1.5):
    return rng.uniform(-scale, scale, size=(h, w, 2)) + rng.uniform(0.01, 0.11)


def kink_free_field(rng, h, w):
    """Random field whose fractional parts stay in [0.1, 0.9], keeping
    finite-difference probes away from the bilinear floor crossings."""
    return rng.integers(-2, 3, size=(h, w, 2)).astype(np.float64) + rng.uniform(
        0.1, 0.9, size=(h, w, 2)
    )


def coords_off_ties(rng, residual, n, margin=5e-3):
    """Sample field coordinates whose l1 residual sits away from zero, so
    the |.| term is differentiable there."""
    h, w = residual.shape
    coords = []
    while len(coords) < n:
        i = int(rng.integers(0, h))
        j = int(rng.integers(0, w))
        if abs(residual[i, j]) > margin:
            coords.append((i, j, int(rng.integers(0, 2))))
    return coords


@pytest.fixture(scope="session")
def benchmark_pairs():
    return synth.benchmark_pairs(128)


@pytest.fixture(scope="session")
def benchmark_results(benchmark_pairs):
    """Optimizer outputs on the ten benchmark pairs, shared across tests."""
    from maskwarp import optimize

    return [
        optimize(p["src_img"], p["src_mask"], p["tgt_mask"]) for p in benchmark_pairs
    ]
