import numpy as np
import pytest

from onesided_mc import (
    CovariateSet,
    GridSpec,
    ObservationMask,
    ObservedDataset,
    SeedSpec,
    SynthConfig,
    fit_rows,
    generate,
    mse,
    oracle_regression,
    rect_kernel,
    row_regression_baseline,
    tune,
)

from conftest import random_dataset


def test_rect_kernel_boundaries():
    assert rect_kernel([0.0, 0.0]) == 1
    assert rect_kernel([0.5]) == 1  # closed threshold
    assert rect_kernel([-0.5, 0.5]) == 1
    assert rect_kernel([0.3, 0.6]) == 0
    assert rect_kernel([0.5000001]) == 0


def _dataset(beta, obs_cols, obs_vals, n=1, sigma=0.0):
    m = len(beta)
    grid = np.zeros((n, m), dtype=bool)
    x = np.zeros((n, m))
    grid[0, obs_cols] = True
    x[0, obs_cols] = obs_vals
    return ObservedDataset(
        ObservationMask(grid), x, CovariateSet(np.asarray(beta)[:, None]), sigma
    )


def test_fit_rows_hand_example():
    # observations at 0.1, 0.2, 0.9 with values 1, 2, 5; window of half-width
    # 0.15 around 0.15 captures the first two
    ds = _dataset([0.1, 0.2, 0.9, 0.15], [0, 1, 2], [1.0, 2.0, 5.0])
    fit = fit_rows(ds, h=0.3)
    assert fit.weights[0, 3] == 2
    assert fit.fhat[0, 3] == pytest.approx(1.5, abs=1e-15)


def test_fit_rows_constant_rows():
    rng = np.random.default_rng(2)
    ds = random_dataset(rng, 6, 20, 0.6)
    const = ObservedDataset(
        ds.mask, np.where(ds.mask.grid, 3.25, 0.0), ds.col_covariates, 0.0
    )
    fit = fit_rows(const, 0.17)
    assert np.all(fit.fhat[fit.valid] == 3.25)


def test_fit_rows_full_window_is_row_mean():
    rng = np.random.default_rng(3)
    ds = random_dataset(rng, 5, 30, 0.4)
    fit = fit_rows(ds, h=2.0)
    for u in range(5):
        cols = ds.mask.row_cols(u)
        if cols.size:
            assert np.allclose(fit.fhat[u], ds.x[u, cols].mean(), atol=1e-12)


def test_fit_rows_weights_monotone_in_h():
    rng = np.random.default_rng(4)
    ds = random_dataset(rng, 8, 40, 0.5)
    w_small = fit_rows(ds, 0.05).weights
    w_big = fit_rows(ds, 0.2).weights
    assert np.all(w_big >= w_small)


def test_fit_rows_row_permutation_equivariance():
    rng = np.random.default_rng(5)
    ds = random_dataset(rng, 7, 25, 0.5)
    perm = rng.permutation(7)
    ds_perm = ObservedDataset(
        ObservationMask(ds.mask.grid[perm]), ds.x[perm], ds.col_covariates, ds.sigma
    )
    fit = fit_rows(ds, 0.15)
    fit_perm = fit_rows(ds_perm, 0.15)
    assert np.array_equal(fit_perm.weights, fit.weights[perm])
    assert np.array_equal(fit_perm.fhat, fit.fhat[perm], equal_nan=True)


def test_fit_rows_depends_only_on_own_row():
    rng = np.random.default_rng(6)
    ds = random_dataset(rng, 6, 30, 0.5)
    fit = fit_rows(ds, 0.2)
    x2 = ds.x.copy()
    x2[1:] += 17.0  # corrupt every other row
    ds2 = ObservedDataset(ds.mask, np.where(ds.mask.grid, x2, 0.0), ds.col_covariates, ds.sigma)
    fit2 = fit_rows(ds2, 0.2)
    assert np.array_equal(fit.fhat[0], fit2.fhat[0], equal_nan=True)
    assert np.array_equal(fit.weights[0], fit2.weights[0])


def test_fit_rows_range_preserved():
    rng = np.random.default_rng(7)
    ds = random_dataset(rng, 6, 30, 0.5)
    fit = fit_rows(ds, 0.3)
    for u in range(6):
        cols = ds.mask.row_cols(u)
        if cols.size == 0:
            continue
        lo, hi = ds.x[u, cols].min(), ds.x[u, cols].max()
        vals = fit.fhat[u][fit.valid[u]]
        assert np.all(vals >= lo - 1e-12) and np.all(vals <= hi + 1e-12)


def test_fit_rows_rejects_bad_bandwidth():
    rng = np.random.default_rng(8)
    ds = random_dataset(rng, 3, 10, 0.5)
    with pytest.raises(ValueError):
        fit_rows(ds, 0.0)


def test_rowreg_bias_bounded_by_window_modulus():
    # full noiseless observation: every window mean deviates from the truth by
    # at most L * (h/2), so the MSE is below (L h / 2)^2
    cfg = SynthConfig(n=30, m=60, p=1.0, sigma=0.0, function_id="f3", seed=SeedSpec(21))
    truth, ds = generate(cfg)
    h = 0.05
    est = row_regression_baseline(ds, h)
    assert mse(est, truth) <= (8.0 * h / 2) ** 2 + 1e-10


def test_rowreg_empty_row_falls_back_to_global_mean():
    grid = np.zeros((2, 4), dtype=bool)
    grid[0] = [True, True, False, False]
    x = np.zeros((2, 4))
    x[0, :2] = [1.0, 3.0]
    ds = ObservedDataset(
        ObservationMask(grid), x, CovariateSet(np.linspace(0, 1, 4)[:, None]), 0.0
    )
    est = row_regression_baseline(ds, 0.1)
    assert np.all(est.values[1] == 2.0)


def test_rowreg_single_observation_wide_window():
    ds = _dataset([0.0, 0.4, 0.9], [1], [7.5])
    est = row_regression_baseline(ds, h=2.0)
    assert np.all(est.values == 7.5)


def test_oracle_regression_global_window_is_global_mean(small_instance):
    truth, ds = small_instance
    est = oracle_regression(ds, truth.row_covariates, 2.0, 2.0)
    gmean = ds.x[ds.mask.grid].mean()
    assert np.allclose(est.values, gmean, atol=1e-12)


def test_oracle_regression_exact_on_constant():
    cfg = SynthConfig(
        n=6, m=8, p=1.0, sigma=0.0, function_id="custom",
        custom_f=lambda a, b: 4.0, seed=SeedSpec(2),
    )
    truth, ds = generate(cfg)
    est = oracle_regression(ds, truth.row_covariates, 0.1, 0.1)
    assert np.allclose(est.values, 4.0, atol=1e-12)


def test_oracle_regression_beats_row_regression():
    # two-sided averaging sees n*m points per window instead of m
    grid = GridSpec(
        h_grid=(0.05, 0.1, 0.2, 0.4), eta2_grid=(0.05, 0.1, 0.2, 0.4),
        k_grid=(1,), tune_objective="oracle",
    )
    wins = 0
    for seed in range(5):
        cfg = SynthConfig(n=50, m=50, p=1.0, sigma=0.2, function_id="f3",
                          seed=SeedSpec(seed))
        truth, ds = generate(cfg)
        po = tune(ds, truth, "oracle", grid)
        pr = tune(ds, truth, "rowreg", grid)
        e_o = mse(oracle_regression(ds, truth.row_covariates, po["h"], po["eta2"]), truth)
        e_r = mse(row_regression_baseline(ds, pr["h"]), truth)
        wins += e_o < e_r
    assert wins == 5
