"""Classical matrix-completion baselines: rank-r alternating least squares and
iterative SVD soft-thresholding (soft impute). Neither uses the column covariates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import STAGE_FACTOR_INIT, ConfigError, DenseEstimate, ObservedDataset, SeedSpec


@dataclass(frozen=True)
class ALSConfig:
    rank: int = 2
    ridge: float = 1e-3
    max_sweeps: int = 200
    tol: float = 1e-6  # relative objective-change stopping threshold
    seed: SeedSpec = SeedSpec(0)

    def __post_init__(self):
        if self.rank < 1:
            raise ConfigError("rank must be at least 1")
        if self.ridge < 0:
            raise ConfigError("ridge must be nonnegative")


@dataclass(frozen=True)
class SoftImputeConfig:
    lambda_grid: tuple | None = None  # descending; None derives one from the data
    n_lambdas: int = 20
    lambda_ratio: float = 1e-3
    max_iters: int = 300
    tol: float = 1e-5
    rank_cap: int | None = None

    def __post_init__(self):
        if self.lambda_grid is not None:
            grid = tuple(float(v) for v in self.lambda_grid)
            if any(b >= a for a, b in zip(grid, grid[1:])) or any(v < 0 for v in grid):
                raise ConfigError("lambda_grid must be strictly descending and nonnegative")
            object.__setattr__(self, "lambda_grid", grid)


def _als_objective(x, grid, u_fac, v_fac, reg):
    resid = (x - u_fac @ v_fac.T) * grid
    return float(np.sum(resid**2) + reg * (np.sum(u_fac**2) + np.sum(v_fac**2)))


def _solve_factor(x, grid, other, reg, rank):
    """Ridge least squares for each row of x over its observed columns."""
    out = np.zeros((x.shape[0], rank))
    eye = reg * np.eye(rank)
    for u in range(x.shape[0]):
        idx = np.flatnonzero(grid[u])
        sub = other[idx]
        out[u] = np.linalg.solve(sub.T @ sub + eye, sub.T @ x[u, idx])
    return out


def als_core(ds: ObservedDataset, cfg: ALSConfig):
    """Alternating ridge least squares; returns factors and objective history.

    The objective sum_E (x - UV^T)^2 + reg (||U||^2 + ||V||^2) is minimized
    exactly in U then in V each sweep, so the history is non-increasing per
    half-sweep. reg floors the ridge at 1e-10 to keep the normal equations
    solvable when rank-deficient.
    """
    n, m = ds.n, ds.m
    if cfg.rank > min(n, m):
        raise ConfigError("rank must not exceed min(n, m)")
    reg = max(cfg.ridge, 1e-10)
    rng = cfg.seed.with_stage(STAGE_FACTOR_INIT).rng()
    u_fac = rng.random((n, cfg.rank)) * 0.02 - 0.01
    v_fac = rng.random((m, cfg.rank)) * 0.02 - 0.01
    grid = ds.mask.grid
    history = [_als_objective(ds.x, grid, u_fac, v_fac, reg)]
    for _ in range(cfg.max_sweeps):
        u_fac = _solve_factor(ds.x, grid, v_fac, reg, cfg.rank)
        history.append(_als_objective(ds.x, grid, u_fac, v_fac, reg))
        v_fac = _solve_factor(ds.x.T, grid.T, u_fac, reg, cfg.rank)
        history.append(_als_objective(ds.x, grid, u_fac, v_fac, reg))
        prev, cur = history[-3], history[-1]
        if abs(prev - cur) <= cfg.tol * max(abs(prev), 1e-30):
            break
    return u_fac, v_fac, history


def als_fit(ds: ObservedDataset, cfg: ALSConfig = ALSConfig()) -> DenseEstimate:
    """Rank-r completion by alternating least squares over the observed entries."""
    u_fac, v_fac, _ = als_core(ds, cfg)
    return DenseEstimate(values=u_fac @ v_fac.T, method="als")


def default_lambda_grid(ds: ObservedDataset, cfg: SoftImputeConfig) -> tuple:
    """Geometric grid from the top singular value of the zero-filled data down."""
    top = float(np.linalg.svd(ds.x, compute_uv=False)[0])
    if top <= 0:
        return (0.0,)
    return tuple(
        top * cfg.lambda_ratio ** (i / (cfg.n_lambdas - 1)) for i in range(cfg.n_lambdas)
    )


def _svt(filled, lam, rank_cap):
    u, s, vt = np.linalg.svd(filled, full_matrices=False)
    shrunk = np.maximum(s - lam, 0.0)
    if rank_cap < shrunk.shape[0]:
        shrunk[rank_cap:] = 0.0
    return (u * shrunk) @ vt, float(shrunk.sum())


def softimpute_path(ds: ObservedDataset, cfg: SoftImputeConfig = SoftImputeConfig()):
    """Soft-impute solutions along a descending shrinkage grid (warm starts).

    Each step iterates: fill the unobserved entries of x with the current
    estimate, SVD, shrink the singular values by lambda (truncated at
    rank_cap), until the relative change in the estimate falls below tol.
    Returns (lambdas, estimates, objective histories); the objective is
    0.5 ||P_E(x - Z)||_F^2 + lambda ||Z||_*.
    """
    lambdas = cfg.lambda_grid if cfg.lambda_grid is not None else default_lambda_grid(ds, cfg)
    rank_cap = cfg.rank_cap if cfg.rank_cap is not None else min(ds.n, ds.m)
    grid = ds.mask.grid
    z = np.zeros_like(ds.x)
    estimates, histories = [], []
    for lam in lambdas:
        history = []
        for _ in range(cfg.max_iters):
            filled = np.where(grid, ds.x, z)
            z_new, nuclear = _svt(filled, lam, rank_cap)
            history.append(
                0.5 * float(np.sum(((ds.x - z_new) * grid) ** 2)) + lam * nuclear
            )
            gap = float(np.sum((z_new - z) ** 2))
            z = z_new
            if gap <= cfg.tol * max(float(np.sum(z**2)), 1e-30):
                break
        estimates.append(z.copy())
        histories.append(history)
    return list(lambdas), estimates, histories


def softimpute_fit(ds: ObservedDataset, cfg: SoftImputeConfig = SoftImputeConfig()) -> DenseEstimate:
    """Soft impute run down the full shrinkage grid; returns the last solution.

    Which lambda to stop at is a model-selection question left to the tuner;
    see `harness.tune`.
    """
    _, estimates, _ = softimpute_path(ds, cfg)
    return DenseEstimate(values=estimates[-1], method="softimpute")
