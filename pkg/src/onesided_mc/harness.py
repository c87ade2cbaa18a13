"""MSE metric, grid-search tuning, and replicated sweep experiments.

Tuning supports two objectives: "validation" holds out a fraction of the
observed entries, fits on the rest, and scores squared error on the held-out
noisy values; "oracle" scores squared error against the ground-truth matrix
(for mirroring idealized benchmark figures). The tuners share all precomputable
work across grid points: for the neighborhood method, growing k only extends a
cumulative sum over each row's distance-ordered neighbors, so the full
h x col-radius x k product grid is swept at matrix-product cost.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .baselines import (
    ALSConfig,
    SoftImputeConfig,
    als_fit,
    default_lambda_grid,
    softimpute_fit,
    softimpute_path,
)
from .data import (
    STAGE_HOLDOUT,
    ConfigError,
    DenseEstimate,
    GroundTruthInstance,
    ObservationMask,
    ObservedDataset,
    SeedSpec,
)
from .distance import estimate_distances
from .kernel import fit_rows, oracle_regression, row_regression_baseline, window_matrix
from .neighbors import NeighborhoodSpec, full_pipeline
from .synth import SynthConfig, generate

METHODS = ("ours", "rowreg", "oracle", "als", "softimpute")

DEFAULT_H_GRID = tuple(round(0.005 * i, 3) for i in range(1, 41))
DEFAULT_K_GRID = tuple(range(1, 51))

RESULT_COLUMNS = (
    "trial", "method", "n", "m", "p", "sigma", "function",
    "h", "eta2", "k", "eta1", "mse", "seconds",
)
SUMMARY_COLUMNS = (
    "method", "n", "m", "p", "sigma", "function", "mse_mean", "mse_std", "trials",
)


@dataclass(frozen=True)
class GridSpec:
    """Search grids and tuning objective."""

    h_grid: tuple = DEFAULT_H_GRID
    eta2_grid: tuple = DEFAULT_H_GRID
    k_grid: tuple = DEFAULT_K_GRID
    tune_objective: str = "validation"
    val_fraction: float = 0.2

    def __post_init__(self):
        for name in ("h_grid", "eta2_grid", "k_grid"):
            grid = tuple(getattr(self, name))
            if not grid or any(v <= 0 for v in grid):
                raise ConfigError(f"{name} must be non-empty with positive values")
            object.__setattr__(self, name, grid)
        if self.tune_objective not in ("validation", "oracle"):
            raise ConfigError("tune_objective must be 'validation' or 'oracle'")
        if not (0.0 < self.val_fraction < 1.0):
            raise ConfigError("val_fraction must lie in (0, 1)")


def mse(est: DenseEstimate, truth: GroundTruthInstance) -> float:
    """Mean squared error against the ground truth over all n*m entries."""
    if est.values.shape != truth.f_matrix.shape:
        raise ValueError(
            f"shape mismatch: estimate {est.values.shape} vs truth {truth.f_matrix.shape}"
        )
    return float(np.mean((est.values - truth.f_matrix) ** 2))


def _holdout(ds: ObservedDataset, frac: float, seed: SeedSpec):
    """Split the observed entries into a training dataset and a held-out set."""
    rows, cols = np.nonzero(ds.mask.grid)
    count = rows.shape[0]
    k = min(int(round(frac * count)), count - 1) if count > 1 else 0
    if k <= 0:
        empty = np.zeros(0, dtype=np.int64)
        return ds, empty, empty, np.zeros(0)
    sel = np.sort(seed.with_stage(STAGE_HOLDOUT).rng().permutation(count)[:k])
    ho_u, ho_i = rows[sel], cols[sel]
    train_grid = ds.mask.grid.copy()
    train_grid[ho_u, ho_i] = False
    train = ObservedDataset(ObservationMask(train_grid), ds.x, ds.col_covariates, ds.sigma)
    return train, ho_u, ho_i, ds.x[ho_u, ho_i]


def _observed_means(ds: ObservedDataset):
    cnt = ds.mask.grid.sum(axis=1)
    total = cnt.sum()
    gmean = float(ds.x.sum() / total) if total > 0 else 0.0
    rmean = np.where(cnt > 0, ds.x.sum(axis=1) / np.maximum(cnt, 1), gmean)
    return rmean, gmean


def _neighbor_selection(fit_ds: ObservedDataset, h: float, k_cap: int):
    """Distance-ordered neighbor rows per row, padded with a virtual empty row.

    Returns an (n, k_cap) index array whose row u lists u itself first, then
    comparable rows by increasing estimated squared distance (ties by index);
    positions past the comparable count point at index n, which callers back
    with a zero row so saturated neighborhoods stop growing.
    """
    fit = fit_rows(fit_ds, h)
    dists = estimate_distances(fit, fit_ds.sigma)
    n = dists.n
    keys = dists.dsq.copy()
    keys[~dists.comparable] = np.inf
    np.fill_diagonal(keys, -np.inf)
    order = np.argsort(keys, axis=1, kind="stable")[:, :k_cap]
    avail = np.isfinite(keys).sum(axis=1) + 1  # comparable others plus self
    pos = np.arange(k_cap)[None, :]
    return np.where(pos < avail[:, None], order, n)


def _col_pools(ds: ObservedDataset, eta2: float):
    """Per-row sums/counts over each column's covariate neighborhood, plus a
    virtual all-zero row for neighbor padding."""
    beta = ds.col_covariates.values
    b_win = window_matrix(beta, beta, eta2).astype(np.float64)
    col_sums = ds.x @ b_win.T
    col_cnts = ds.mask.grid.astype(np.float64) @ b_win.T
    zero = np.zeros((1, ds.m))
    return np.vstack([col_sums, zero]), np.vstack([col_cnts, zero])


def _tune_ours_validation(ds, grid, seed):
    train, ho_u, ho_i, ho_x = _holdout(ds, grid.val_fraction, seed)
    if ho_u.shape[0] == 0:
        return {"h": grid.h_grid[0], "eta2": grid.eta2_grid[0], "k": grid.k_grid[0]}
    rmean, _ = _observed_means(train)
    row_fb = rmean[ho_u]
    k_cap = min(max(grid.k_grid), ds.n)
    k_idx = np.array([min(k, k_cap) - 1 for k in grid.k_grid])

    pools = []
    for eta2 in grid.eta2_grid:
        cs, cc = _col_pools(train, eta2)
        own_cnt = cc[ho_u, ho_i]
        with np.errstate(invalid="ignore", divide="ignore"):
            own = np.where(own_cnt > 0, cs[ho_u, ho_i] / own_cnt, row_fb)
        pools.append((cs, cc, own))

    best = (np.inf, None)
    for h in grid.h_grid:
        sel = _neighbor_selection(train, h, k_cap)
        sel_ho = sel[ho_u]
        cols = ho_i[:, None]
        for eta2, (cs, cc, own) in zip(grid.eta2_grid, pools):
            sums = np.cumsum(cs[sel_ho, cols], axis=1)
            cnts = np.cumsum(cc[sel_ho, cols], axis=1)
            with np.errstate(invalid="ignore", divide="ignore"):
                preds = np.where(cnts > 0, sums / cnts, own[:, None])
            scores = np.mean((preds - ho_x[:, None]) ** 2, axis=0)[k_idx]
            for k, score in zip(grid.k_grid, scores):
                if score < best[0]:
                    best = (score, {"h": h, "eta2": eta2, "k": k})
    return best[1]


def _tune_ours_oracle(ds, truth, grid):
    f = truth.f_matrix
    rmean, _ = _observed_means(ds)
    k_cap = min(max(grid.k_grid), ds.n)
    tail_ks = [k for k in grid.k_grid if k > k_cap]

    pools = []
    for eta2 in grid.eta2_grid:
        cs, cc = _col_pools(ds, eta2)
        with np.errstate(invalid="ignore", divide="ignore"):
            own = np.where(cc[:-1] > 0, cs[:-1] / cc[:-1], rmean[:, None])
        pools.append((cs, cc, own))

    best = (np.inf, None)
    for h in grid.h_grid:
        sel = _neighbor_selection(ds, h, k_cap)
        for eta2, (cs, cc, own) in zip(grid.eta2_grid, pools):
            sums = np.zeros_like(f)
            cnts = np.zeros_like(f)
            k_scores = {}
            for t in range(k_cap):
                sums += cs[sel[:, t]]
                cnts += cc[sel[:, t]]
                if (t + 1) in grid.k_grid or (t + 1 == k_cap and tail_ks):
                    with np.errstate(invalid="ignore", divide="ignore"):
                        est = np.where(cnts > 0, sums / cnts, own)
                    k_scores[t + 1] = float(np.mean((est - f) ** 2))
            for k in grid.k_grid:
                score = k_scores[min(k, k_cap)]
                if score < best[0]:
                    best = (score, {"h": h, "eta2": eta2, "k": k})
    return best[1]


def _tune_rowreg(ds, truth, grid, seed):
    if grid.tune_objective == "oracle":
        best = (np.inf, None)
        for h in grid.h_grid:
            score = mse(row_regression_baseline(ds, h), truth)
            if score < best[0]:
                best = (score, {"h": h})
        return best[1]
    train, ho_u, ho_i, ho_x = _holdout(ds, grid.val_fraction, seed)
    if ho_u.shape[0] == 0:
        return {"h": grid.h_grid[0]}
    rmean, _ = _observed_means(train)
    best = (np.inf, None)
    for h in grid.h_grid:
        fit = fit_rows(train, h)
        preds = fit.fhat[ho_u, ho_i]
        preds = np.where(np.isnan(preds), rmean[ho_u], preds)
        score = float(np.mean((preds - ho_x) ** 2))
        if score < best[0]:
            best = (score, {"h": h})
    return best[1]


def _tune_oracle_reg(ds, truth, grid, seed):
    alpha = truth.row_covariates.values
    if grid.tune_objective == "oracle":
        grids_b = [
            window_matrix(ds.col_covariates.values, ds.col_covariates.values, h2 / 2.0)
            .astype(np.float64)
            for h2 in grid.eta2_grid
        ]
        x_pools = [(ds.x @ b.T, ds.mask.grid.astype(np.float64) @ b.T) for b in grids_b]
        rmean, _ = _observed_means(ds)
        best = (np.inf, None)
        for h1 in grid.h_grid:
            a_win = window_matrix(alpha, alpha, h1 / 2.0).astype(np.float64)
            for h2, (xs, cn) in zip(grid.eta2_grid, x_pools):
                sums = a_win @ xs
                cnts = a_win @ cn
                with np.errstate(invalid="ignore", divide="ignore"):
                    est = np.where(cnts > 0, sums / cnts, rmean[:, None])
                score = float(np.mean((est - truth.f_matrix) ** 2))
                if score < best[0]:
                    best = (score, {"h": h1, "eta2": h2})
        return best[1]
    train, ho_u, ho_i, ho_x = _holdout(ds, grid.val_fraction, seed)
    if ho_u.shape[0] == 0:
        return {"h": grid.h_grid[0], "eta2": grid.eta2_grid[0]}
    rmean, _ = _observed_means(train)
    row_fb = rmean[ho_u]
    pools = []
    for h2 in grid.eta2_grid:
        b = window_matrix(train.col_covariates.values, train.col_covariates.values, h2 / 2.0)
        b = b.astype(np.float64)
        xs = (train.x @ b.T)[:, ho_i].T.copy()  # (holdout, n)
        cn = (train.mask.grid.astype(np.float64) @ b.T)[:, ho_i].T.copy()
        pools.append((xs, cn))
    best = (np.inf, None)
    for h1 in grid.h_grid:
        a_ho = window_matrix(alpha[ho_u], alpha, h1 / 2.0).astype(np.float64)
        for h2, (xs, cn) in zip(grid.eta2_grid, pools):
            sums = np.einsum("ev,ev->e", a_ho, xs)
            cnts = np.einsum("ev,ev->e", a_ho, cn)
            with np.errstate(invalid="ignore", divide="ignore"):
                preds = np.where(cnts > 0, sums / cnts, row_fb)
            score = float(np.mean((preds - ho_x) ** 2))
            if score < best[0]:
                best = (score, {"h": h1, "eta2": h2})
    return best[1]


def _tune_softimpute(ds, truth, grid, seed):
    if grid.tune_objective == "oracle":
        lams, ests, _ = softimpute_path(ds)
        scores = [float(np.mean((z - truth.f_matrix) ** 2)) for z in ests]
    else:
        train, ho_u, ho_i, ho_x = _holdout(ds, grid.val_fraction, seed)
        lams, ests, _ = softimpute_path(train)
        if ho_u.shape[0] == 0:
            return {"lambda": lams[-1]}
        scores = [float(np.mean((z[ho_u, ho_i] - ho_x) ** 2)) for z in ests]
    return {"lambda": lams[int(np.argmin(scores))]}


def tune(ds, truth, method, grid: GridSpec = GridSpec(), seed: SeedSpec = SeedSpec(0)) -> dict:
    """Grid-search the method's tuning knobs; returns the chosen parameters.

    Ties are broken toward the smallest parameter values in grid order. The
    validation objective is deterministic given `seed`.
    """
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}")
    if grid.tune_objective == "oracle" and truth is None:
        raise ConfigError("oracle tuning objective needs the ground truth")
    if method == "ours":
        if grid.tune_objective == "oracle":
            return _tune_ours_oracle(ds, truth, grid)
        return _tune_ours_validation(ds, grid, seed)
    if method == "rowreg":
        return _tune_rowreg(ds, truth, grid, seed)
    if method == "oracle":
        if truth is None:
            raise ConfigError("the oracle method needs the ground truth covariates")
        return _tune_oracle_reg(ds, truth, grid, seed)
    if method == "softimpute":
        return _tune_softimpute(ds, truth, grid, seed)
    return {}  # als: fixed rank and defaults, nothing tuned


def fit_predict(ds, truth, method, params: dict, seed: SeedSpec = SeedSpec(0)) -> DenseEstimate:
    """Fit `method` with the given parameters on the full dataset."""
    if method == "ours":
        spec = NeighborhoodSpec(
            col_radius=params["eta2"],
            k_nearest=params.get("k"),
            row_radius=params.get("eta1"),
        )
        return full_pipeline(ds, params["h"], spec, split=bool(params.get("split")), seed=seed)
    if method == "rowreg":
        return row_regression_baseline(ds, params["h"])
    if method == "oracle":
        if truth is None:
            raise ConfigError("the oracle method needs the ground truth covariates")
        return oracle_regression(ds, truth.row_covariates, params["h"], params["eta2"])
    if method == "als":
        return als_fit(ds, ALSConfig(rank=int(params.get("rank", 2)), seed=seed))
    if method == "softimpute":
        cfg = SoftImputeConfig()
        if "lambda" in params:
            lam = float(params["lambda"])
            head = [v for v in default_lambda_grid(ds, cfg) if v > lam]
            cfg = replace(cfg, lambda_grid=tuple(head + [lam]))
        return softimpute_fit(ds, cfg)
    raise ConfigError(f"unknown method {method!r}")


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    method: str
    n: int
    m: int
    p: float
    sigma: float
    function_id: str
    params: dict
    mse: float
    seconds: float


@dataclass
class ExperimentResult:
    records: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def summary_rows(self):
        """Mean/std of MSE per (method, n, m, p, sigma, function) cell."""
        groups = {}
        for r in self.records:
            groups.setdefault(
                (r.method, r.n, r.m, r.p, r.sigma, r.function_id), []
            ).append(r.mse)
        rows = []
        for key in sorted(groups, key=lambda k: (k[1], k[3], _method_rank(k[0]))):
            vals = np.asarray(groups[key])
            std = float(vals.std(ddof=1)) if vals.size > 1 else 0.0
            rows.append(key + (float(vals.mean()), std, int(vals.size)))
        return rows

    def to_csv(self, path):
        write_records_csv(self.records, path)

    def summary_to_csv(self, path):
        write_summary_csv(self.summary_rows(), path)


def _method_rank(method):
    return METHODS.index(method) if method in METHODS else len(METHODS)


def _fmt(value):
    if value is None or value == "":
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_records_csv(records, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(RESULT_COLUMNS) + "\n")
        for r in records:
            row = (
                r.trial, r.method, r.n, r.m, r.p, r.sigma, r.function_id,
                r.params.get("h"), r.params.get("eta2"), r.params.get("k"),
                r.params.get("eta1"), r.mse, round(r.seconds, 6),
            )
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_summary_csv(rows, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(SUMMARY_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


_AXIS_TAGS = {"n": 0, "p": 1}


def _cell_seed(base_seed: SeedSpec, axis: str, value, trial: int) -> SeedSpec:
    encoded = int(value) if axis == "n" else int(round(value * 10**9))
    return base_seed.child(_AXIS_TAGS[axis], encoded).with_trial(trial)


def _run_cell(task):
    base, axis, value, trial, methods, grid = task
    seed = _cell_seed(base.seed, axis, value, trial)
    cfg = replace(base, seed=seed, **{axis: value})
    truth, ds = generate(cfg)
    records = []
    for method in methods:
        start = time.perf_counter()
        params = tune(ds, truth, method, grid, seed)
        est = fit_predict(ds, truth, method, params, seed)
        seconds = time.perf_counter() - start
        records.append(
            TrialRecord(
                trial=trial, method=method, n=cfg.n, m=cfg.m, p=cfg.p,
                sigma=cfg.sigma, function_id=cfg.function_id, params=params,
                mse=mse(est, truth), seconds=seconds,
            )
        )
    cell_meta = {"axis": axis, "value": value, "trial": trial,
                 "dataset_sha256": ds.content_hash()}
    return records, cell_meta


def _run_sweep(base, axis, values, methods, grid, trials, jobs):
    for method in methods:
        if method not in METHODS:
            raise ConfigError(f"unknown method {method!r}")
    if trials < 1:
        raise ConfigError("trials must be at least 1")
    tasks = [
        (base, axis, value, trial, tuple(methods), grid)
        for value in values
        for trial in range(trials)
    ]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outputs = list(pool.map(_run_cell, tasks))
    else:
        outputs = [_run_cell(task) for task in tasks]
    records = [r for recs, _ in outputs for r in recs]
    records.sort(
        key=lambda r: (r.n, r.m, r.p, r.sigma, r.function_id, r.trial, _method_rank(r.method))
    )
    meta = {
        "axis": axis,
        "values": list(values),
        "trials": trials,
        "methods": list(methods),
        "objective": grid.tune_objective,
        "master_seed": base.seed.master,
        "cells": [cell for _, cell in outputs],
    }
    return ExperimentResult(records=records, meta=meta)


def sweep_n(base: SynthConfig, n_list, methods, grid: GridSpec = GridSpec(),
            trials: int = 5, jobs: int = 1) -> ExperimentResult:
    """Run every method on shared instances for each row count in `n_list`.

    One instance is generated per (n, trial) from a seed derived from the base
    seed, the axis value, and the trial index, and every method consumes that
    same instance.
    """
    return _run_sweep(base, "n", list(n_list), methods, grid, trials, jobs)


def sweep_p(base: SynthConfig, p_list, methods, grid: GridSpec = GridSpec(),
            trials: int = 5, jobs: int = 1) -> ExperimentResult:
    """As `sweep_n`, varying the observation probability instead."""
    return _run_sweep(base, "p", list(p_list), methods, grid, trials, jobs)
