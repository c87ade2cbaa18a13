"""Noise-debiased squared distances between row profiles.

The squared gap between two rows' windowed-mean fits overestimates the gap
between their latent profiles because the observation noise enters each fit;
the estimators here subtract the exact noise contribution so the estimate is
unbiased (over noise draws) for the noiseless smoothed distance. Columns where
either row's window is empty are dropped from a pair's average, and the
normalization uses the count of columns actually compared.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import GroundTruthInstance, ObservationMask, _freeze
from .kernel import RowRegressionFit, _nw_fit, window_matrix


@dataclass(frozen=True)
class RowDistanceMatrix:
    """Symmetric matrix of debiased squared row distances.

    Off-diagonal entries may be negative (the bias correction is subtracted,
    never clamped). valid_cols[u, v] counts the columns where both rows had a
    nonempty window; pairs with zero shared columns are incomparable and carry
    dsq 0 as a placeholder.
    """

    dsq: np.ndarray  # (n, n)
    valid_cols: np.ndarray  # (n, n) int64

    def __post_init__(self):
        object.__setattr__(self, "dsq", _freeze(np.asarray(self.dsq, dtype=np.float64)))
        object.__setattr__(
            self, "valid_cols", _freeze(np.asarray(self.valid_cols, dtype=np.int64))
        )

    @property
    def n(self) -> int:
        return self.dsq.shape[0]

    @property
    def comparable(self) -> np.ndarray:
        """Boolean matrix: pair has at least one shared valid column (diag True)."""
        out = self.valid_cols > 0
        return out | np.eye(self.n, dtype=bool)


def noise_bias_correction(
    fit: RowRegressionFit,
    mask: ObservationMask,
    beta: np.ndarray,
    sigma: float,
    u: int,
    v: int,
) -> float:
    """Noise-variance term entering the squared distance of rows u and v.

    Equals sigma^2 times the average over shared valid columns i of
    sum_l (E_ul / W_ui^2 + E_vl / W_vi^2) K^2((beta_l - beta_i) / h), the
    exact mean of the squared noise part of fhat(u, i) - fhat(v, i).
    Returns 0 for an incomparable pair.
    """
    valid_i = fit.valid[u] & fit.valid[v]
    count = int(valid_i.sum())
    if count == 0:
        return 0.0
    ksq = window_matrix(beta, beta, fit.h / 2.0).astype(np.float64) ** 2
    w_u = fit.weights[u, valid_i].astype(np.float64)
    w_v = fit.weights[v, valid_i].astype(np.float64)
    term_u = (mask.grid[u].astype(np.float64) @ ksq)[valid_i] / w_u**2
    term_v = (mask.grid[v].astype(np.float64) @ ksq)[valid_i] / w_v**2
    return float(sigma**2 * (term_u.sum() + term_v.sum()) / count)


def estimate_distances(fit: RowRegressionFit, sigma: float) -> RowDistanceMatrix:
    """Debiased squared distances between all row pairs.

    For u != v, dsq(u, v) is the mean over shared valid columns of
    (fhat(u, i) - fhat(v, i))^2 minus the noise term of
    `noise_bias_correction`; dsq(u, u) is 0 by definition. For the box kernel
    the per-column noise term collapses to sigma^2 (1/W_ui + 1/W_vi), which is
    what the vectorized form below uses.
    """
    valid = fit.valid
    vf = valid.astype(np.float64)
    g = np.where(valid, fit.fhat, 0.0)

    pair_cols = vf @ vf.T  # shared valid-column counts, exact integers
    sq = (g * g) @ vf.T  # sum_i g[u,i]^2 over columns valid for both rows
    cross = g @ g.T
    gap_sq = sq + sq.T - 2.0 * cross

    with np.errstate(invalid="ignore", divide="ignore"):
        inv_w = np.where(valid, 1.0 / fit.weights, 0.0)
    noise = inv_w @ vf.T
    noise = sigma**2 * (noise + noise.T)

    with np.errstate(invalid="ignore", divide="ignore"):
        dsq = np.where(pair_cols > 0, (gap_sq - noise) / pair_cols, 0.0)
    # exact symmetry and zero diagonal, independent of BLAS rounding details
    dsq = np.triu(dsq, 1)
    dsq = dsq + dsq.T
    return RowDistanceMatrix(dsq=dsq, valid_cols=pair_cols.astype(np.int64))


def oracle_smoothed_fit(
    truth: GroundTruthInstance, mask: ObservationMask, h: float
) -> RowRegressionFit:
    """Windowed means of the noiseless values over the same mask and windows.

    Test-only: this is what `fit_rows` would return if the observations
    carried no noise, with identical weights and empty-window flags.
    """
    if h <= 0:
        raise ValueError("bandwidth h must be positive")
    x = np.where(mask.grid, truth.f_matrix, 0.0)
    fhat, weights = _nw_fit(x, mask.grid, truth.col_covariates.values, h)
    return RowRegressionFit(fhat=fhat, weights=weights, h=h)


def smoothed_distance_from_fit(fit: RowRegressionFit, u: int, v: int) -> float:
    """Mean squared gap between two smoothed rows over shared valid columns."""
    valid_i = fit.valid[u] & fit.valid[v]
    count = int(valid_i.sum())
    if count == 0:
        return float("nan")
    gap = fit.fhat[u, valid_i] - fit.fhat[v, valid_i]
    return float(np.mean(gap**2))


def oracle_smoothed_distance_sq(
    truth: GroundTruthInstance, mask: ObservationMask, h: float, u: int, v: int
) -> float:
    """Squared distance between noiseless smoothed rows u and v.

    Same valid-column convention as `estimate_distances`; NaN if the pair has
    no shared valid columns. Test-only.
    """
    fit = oracle_smoothed_fit(truth, mask, h)
    if u == v:
        return 0.0
    return smoothed_distance_from_fit(fit, u, v)


def true_distance_sq(truth: GroundTruthInstance, u: int, v: int) -> float:
    """Mean squared gap of the noiseless rows across all columns. Test-only."""
    gap = truth.f_matrix[u] - truth.f_matrix[v]
    return float(np.mean(gap**2))
