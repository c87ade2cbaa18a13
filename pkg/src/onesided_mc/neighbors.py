"""Fixed-radius nearest-neighbor completion from estimated row distances.

A cell (u, i) is predicted by averaging all observed entries whose row is
close to u in estimated distance (or among the k closest rows) and whose
column covariate is within a radius of column i's.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import ConfigError, DenseEstimate, ObservedDataset, SeedSpec, split_mask
from .distance import RowDistanceMatrix, estimate_distances
from .kernel import _fallback_fill, fit_rows, window_matrix

REGIME_ROW_ONLY = "row_only"
REGIME_ORACLE_MATCHING = "oracle_matching"
REGIME_DISTANCE_LIMITED = "distance_limited"


@dataclass(frozen=True)
class NeighborhoodSpec:
    """Row rule (radius on squared distance, or k closest) plus column radius."""

    col_radius: float
    row_radius: float | None = None
    k_nearest: int | None = None

    def __post_init__(self):
        if (self.row_radius is None) == (self.k_nearest is None):
            raise ConfigError("set exactly one of row_radius and k_nearest")
        if self.col_radius < 0:
            raise ConfigError("col_radius must be nonnegative")
        if self.row_radius is not None and self.row_radius < 0:
            raise ConfigError("row_radius must be nonnegative")
        if self.k_nearest is not None and self.k_nearest < 1:
            raise ConfigError("k_nearest must be at least 1")


def _neighbor_order(dists: RowDistanceMatrix, u: int) -> np.ndarray:
    """Comparable rows of u ordered by (dsq, index), with u itself first."""
    keys = dists.dsq[u].copy()
    keys[~dists.comparable[u]] = np.inf
    keys[u] = -np.inf  # u always leads its own neighborhood
    order = np.argsort(keys, kind="stable")
    return order[: int(np.isfinite(keys).sum()) + 1]


def build_row_neighborhood(
    dists: RowDistanceMatrix, u: int, spec: NeighborhoodSpec
) -> np.ndarray:
    """Sorted row indices forming u's neighborhood; always contains u.

    Radius rule: rows v with dsq(u, v) <= radius^2 (closed). k rule: u plus
    the k-1 comparable rows of smallest dsq, ties broken by lower index.
    Incomparable pairs are excluded under both rules.
    """
    if spec.k_nearest is not None:
        order = _neighbor_order(dists, u)
        return np.sort(order[: min(spec.k_nearest, order.shape[0])])
    inside = dists.comparable[u] & (dists.dsq[u] <= spec.row_radius**2)
    inside[u] = True
    return np.flatnonzero(inside)


def build_col_neighborhood(beta: np.ndarray, i: int, col_radius: float) -> np.ndarray:
    """Sorted column indices within `col_radius` of column i (max norm)."""
    near = np.max(np.abs(beta - beta[i]), axis=1) <= col_radius
    return np.flatnonzero(near)


def _row_indicator(dists: RowDistanceMatrix, spec: NeighborhoodSpec, n: int) -> np.ndarray:
    a = np.zeros((n, n), dtype=np.float64)
    for u in range(n):
        a[u, build_row_neighborhood(dists, u, spec)] = 1.0
    return a


def nn_predict(
    ds: ObservedDataset, dists: RowDistanceMatrix, spec: NeighborhoodSpec
) -> DenseEstimate:
    """Average the observed entries over each cell's neighborhood rectangle.

    When a cell's neighborhood contains no observation, fall back to the mean
    over its own row restricted to the column neighborhood, then the row
    observed mean, then the global observed mean, so the output is total.
    """
    if dists.n != ds.n:
        raise ValueError("distance matrix must cover every row of the dataset")
    beta = ds.col_covariates.values
    b_win = window_matrix(beta, beta, spec.col_radius).astype(np.float64)
    grid = ds.mask.grid.astype(np.float64)

    col_sums = ds.x @ b_win.T  # own-row sums over the column neighborhood
    col_counts = grid @ b_win.T
    a = _row_indicator(dists, spec, ds.n)
    sums = a @ col_sums
    counts = a @ col_counts

    with np.errstate(invalid="ignore", divide="ignore"):
        est = np.where(counts > 0, sums / counts, np.nan)
        own_row = np.where(col_counts > 0, col_sums / col_counts, np.nan)
    est = np.where(np.isnan(est), own_row, est)
    return DenseEstimate(values=_fallback_fill(est, ds), method="ours")


def full_pipeline(
    ds: ObservedDataset,
    h: float,
    spec: NeighborhoodSpec,
    split: bool = False,
    seed: SeedSpec = SeedSpec(0),
) -> DenseEstimate:
    """Row fits -> debiased row distances -> neighborhood averaging.

    With `split` the observed entries are partitioned at random: one half
    learns the distances, the other feeds the final averages. Disabled by
    default; the sweep experiments reuse the full sample for both stages.
    """
    ds_fit, ds_pred = split_mask(ds, seed, split)
    fit = fit_rows(ds_fit, h)
    dists = estimate_distances(fit, ds.sigma)
    return nn_predict(ds_pred, dists, spec)


@dataclass(frozen=True)
class TheoryParams:
    """Rate-optimal parameter recipe (unit constants) and regime label."""

    lam: float
    L: float
    regime: str
    h: float
    eta1: float
    eta2: float


def theory_params(
    n: int,
    m: int,
    p: float,
    lam: float,
    L: float,
    d1: int = 1,
    d2: int = 1,
    sigma: float = 0.0,
) -> TheoryParams:
    """Classify the instance into one of three regimes and suggest parameters.

    Row-only: so few rows that fitting each row separately is already
    rate-optimal. Oracle-matching: sharing across rows recovers the rate of a
    regression oracle that knows the row covariates. Distance-limited: the
    per-row budget caps how well row distances can be estimated, which caps
    the final rate. All constants inside the rates are set to 1; a tuner
    should refine them.
    """
    if min(n, m, d1, d2) < 1 or not (0 < p <= 1) or L <= 0 or sigma < 0:
        raise ConfigError("arguments must be positive (sigma nonnegative)")
    if not (0 < lam <= 1):
        raise ConfigError("smoothness exponent must lie in (0, 1]")
    mp = m * p
    row_only_cap = mp ** (d1 / (2 * lam + d2))
    matching_cap = mp ** min((2 * lam + d1) / d2, (2 * d1 + d2) / (4 * lam + d2))
    if n <= row_only_cap:
        h = (p * m) ** (-1.0 / (2 * lam + d2))
        return TheoryParams(lam, L, REGIME_ROW_ONLY, h=h, eta1=0.0, eta2=h)
    h = (p * m / math.log(m * n)) ** (-min(1.0 / d2, 2.0 / (d2 + 4 * lam)))
    if n <= matching_cap:
        eta1 = (p * n * m) ** (-lam / (2 * lam + d1 + d2))
        return TheoryParams(
            lam, L, REGIME_ORACLE_MATCHING, h=h, eta1=eta1, eta2=eta1 ** (1.0 / lam)
        )
    # distance-limited: thresholds derived from the distance estimation error,
    # noise part plus window bias, again with unit constants
    delta = sigma * math.sqrt(math.log(n) / (p * m * h ** (d2 / 2.0))) + L * (h / 2) ** lam
    return TheoryParams(
        lam, L, REGIME_DISTANCE_LIMITED, h=h, eta1=2 * delta, eta2=delta ** (1.0 / lam)
    )
