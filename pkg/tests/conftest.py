import numpy as np
import pytest

from onesided_mc import SeedSpec, SynthConfig, generate


@pytest.fixture(scope="session")
def small_instance():
    """A small noisy instance shared by read-only tests."""
    cfg = SynthConfig(n=15, m=40, p=0.5, sigma=0.2, function_id="f3", seed=SeedSpec(42))
    return generate(cfg)


@pytest.fixture(scope="session")
def dense_noiseless():
    """Fully observed, noise-free instance: x equals the ground truth."""
    cfg = SynthConfig(n=12, m=25, p=1.0, sigma=0.0, function_id="f3", seed=SeedSpec(5))
    return generate(cfg)


def random_dataset(rng, n, m, p):
    """Hand-rolled dataset with arbitrary (non-model) values, for exactness tests."""
    from onesided_mc import CovariateSet, ObservationMask, ObservedDataset

    grid = rng.random((n, m)) < p
    if not grid.any():
        grid[0, 0] = True
    x = np.where(grid, rng.standard_normal((n, m)) * 2.0, 0.0)
    beta = rng.random((m, 1))
    return ObservedDataset(ObservationMask(grid), x, CovariateSet(beta), sigma=0.3)
