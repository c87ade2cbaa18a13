import numpy as np
import pytest

from onesided_mc import (
    CovariateSet,
    ObservationMask,
    ObservedDataset,
    SeedSpec,
    SynthConfig,
    generate,
    split_mask,
)
from onesided_mc.data import normals


def test_seedspec_reproducible_and_streams_independent():
    a = SeedSpec(123, trial=1, stage=2).rng().random(16)
    b = SeedSpec(123, trial=1, stage=2).rng().random(16)
    assert np.array_equal(a, b)
    c = SeedSpec(123, trial=1, stage=3).rng().random(16)
    d = SeedSpec(123, trial=2, stage=2).rng().random(16)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_seedspec_child_derives_new_master():
    base = SeedSpec(7)
    assert base.child(0, 100) == base.child(0, 100)
    assert base.child(0, 100) != base.child(0, 101)
    assert base.child(0, 100) != base.child(1, 100)


def test_normals_inverse_cdf_sane():
    z = normals(SeedSpec(9).rng(), 200_000)
    assert np.all(np.isfinite(z))
    assert abs(z.mean()) < 0.01
    assert abs(z.std() - 1.0) < 0.01


def test_covariates_validated():
    CovariateSet(np.array([[0.0], [1.0], [0.5]]))
    with pytest.raises(ValueError):
        CovariateSet(np.array([[1.2]]))
    with pytest.raises(ValueError):
        CovariateSet(np.array([[-0.1]]))


def test_mask_membership_and_row_iteration():
    mask = ObservationMask.from_entries([(0, 1), (0, 3), (2, 0)], n=3, m=4)
    assert mask.count == 3
    assert mask.contains(0, 3) and not mask.contains(1, 1)
    assert mask.row_cols(0).tolist() == [1, 3]
    assert mask.row_cols(1).tolist() == []
    assert mask.entries().shape == (3, 2)


def test_mask_rejects_duplicates_and_out_of_range():
    with pytest.raises(ValueError):
        ObservationMask.from_entries([(0, 0), (0, 0)], n=2, m=2)
    with pytest.raises(ValueError):
        ObservationMask.from_entries([(2, 0)], n=2, m=2)


def test_dataset_zeroes_values_off_mask():
    mask = ObservationMask.from_entries([(0, 0)], n=2, m=2)
    ds = ObservedDataset(mask, np.ones((2, 2)), CovariateSet(np.zeros((2, 1))), 0.1)
    assert ds.x[0, 0] == 1.0
    assert ds.x[1, 1] == 0.0


def test_split_disabled_is_identity(small_instance):
    _, ds = small_instance
    left, right = split_mask(ds, SeedSpec(1), enabled=False)
    assert left is ds and right is ds


def test_split_partitions_mask():
    cfg = SynthConfig(n=40, m=50, p=0.5, sigma=0.0, function_id="f3", seed=SeedSpec(11))
    _, ds = generate(cfg)
    left, right = split_mask(ds, SeedSpec(11), enabled=True)
    union = left.mask.grid | right.mask.grid
    both = left.mask.grid & right.mask.grid
    assert np.array_equal(union, ds.mask.grid)
    assert not both.any()
    # values survive on each side
    assert np.array_equal(left.x[left.mask.grid], ds.x[left.mask.grid])
    assert np.array_equal(right.x[right.mask.grid], ds.x[right.mask.grid])


def test_split_half_binomial_band():
    # |E| = 1000 coin flips: each half within 4 sqrt(1000/4) of 500
    grid = np.zeros((20, 50), dtype=bool)
    grid[:, :] = True
    ds = ObservedDataset(
        ObservationMask(grid),
        np.ones((20, 50)),
        CovariateSet(np.linspace(0, 1, 50)[:, None]),
        0.0,
    )
    left, _ = split_mask(ds, SeedSpec(3), enabled=True)
    assert abs(left.mask.count - 500) <= 4 * np.sqrt(1000 * 0.25)


def test_split_deterministic():
    cfg = SynthConfig(n=10, m=30, p=0.6, sigma=0.1, function_id="f1", seed=SeedSpec(2))
    _, ds = generate(cfg)
    a1, b1 = split_mask(ds, SeedSpec(5), enabled=True)
    a2, b2 = split_mask(ds, SeedSpec(5), enabled=True)
    assert np.array_equal(a1.mask.grid, a2.mask.grid)
    assert np.array_equal(b1.mask.grid, b2.mask.grid)
