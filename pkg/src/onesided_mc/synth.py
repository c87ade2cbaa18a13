"""Synthetic instance generation: latent surfaces, uniform covariates, Bernoulli masks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import (
    STAGE_COL_COVARIATES,
    STAGE_MASK,
    STAGE_NOISE,
    STAGE_ROW_COVARIATES,
    ConfigError,
    CovariateSet,
    GroundTruthInstance,
    ObservationMask,
    ObservedDataset,
    SeedSpec,
    normals,
)

LATENT_FUNCTION_IDS = ("f1", "f2", "f3")

# Declared (exponent, constant) smoothness of each built-in surface, from the
# suprema of the partial derivatives on the unit square.
FUNCTION_SMOOTHNESS = {
    "f1": (1.0, 8.75),
    "f2": (1.0, 34.0),
    "f3": (1.0, 8.0),
}


def _surface(function_id, a, b):
    """Evaluate a built-in surface on the grid a x b; a, b are 1-d arrays."""
    if function_id == "f1":
        return np.outer(np.sin(5 * a), np.sin(5 * b)) + 0.05 * np.outer(
            np.sin(25 * a), np.sin(25 * b)
        ) ** 3
    if function_id == "f2":
        return np.outer(np.sin(10 * a), np.sin(4 * b)) + 0.2 * np.outer(
            np.sin(40 * a), np.sin(40 * b)
        ) ** 3
    if function_id == "f3":
        return np.sin(3 + 6 * a[:, None] + 4 * b[None, :] ** 2)
    raise ConfigError(f"unknown function id {function_id!r}")


def latent_f(function_id, alpha, beta, custom_f=None):
    """Value of the latent surface at a single (row, column) covariate pair.

    Built-in surfaces are bivariate (one row and one column coordinate);
    `custom` delegates to a user-supplied callable of two coordinate vectors.
    """
    alpha = np.atleast_1d(np.asarray(alpha, dtype=np.float64))
    beta = np.atleast_1d(np.asarray(beta, dtype=np.float64))
    if function_id == "custom":
        if custom_f is None:
            raise ConfigError("function id 'custom' needs an evaluator")
        return float(custom_f(alpha, beta))
    if function_id not in LATENT_FUNCTION_IDS:
        raise ConfigError(f"unknown function id {function_id!r}")
    if alpha.shape != (1,) or beta.shape != (1,):
        raise ConfigError(f"{function_id} expects one row and one column coordinate")
    return float(_surface(function_id, alpha, beta)[0, 0])


@dataclass(frozen=True)
class SynthConfig:
    """Instance shape, sampling density, noise level, surface, and seed."""

    n: int
    m: int
    d1: int = 1
    d2: int = 1
    p: float = 0.05
    sigma: float = 0.2
    function_id: str = "f3"
    seed: SeedSpec = SeedSpec(0)
    custom_f: object = None
    custom_smoothness: tuple = (1.0, 1.0)

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ConfigError("n and m must be at least 1")
        if not (0.0 < self.p <= 1.0):
            raise ConfigError("p must lie in (0, 1]")
        if self.sigma < 0:
            raise ConfigError("sigma must be nonnegative")
        if self.function_id not in LATENT_FUNCTION_IDS + ("custom",):
            raise ConfigError(f"unknown function id {self.function_id!r}")
        if self.function_id in LATENT_FUNCTION_IDS and not (self.d1 == self.d2 == 1):
            raise ConfigError(f"{self.function_id} requires d1 = d2 = 1")
        if self.function_id == "custom" and self.custom_f is None:
            raise ConfigError("function id 'custom' needs an evaluator")


def truth_matrix(cfg: SynthConfig, alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """Dense noiseless matrix for the given covariates; bit-reproducible."""
    if cfg.function_id == "custom":
        out = np.empty((alpha.shape[0], beta.shape[0]))
        for u in range(alpha.shape[0]):
            for i in range(beta.shape[0]):
                out[u, i] = cfg.custom_f(alpha[u], beta[i])
        return out
    return _surface(cfg.function_id, alpha[:, 0], beta[:, 0])


def generate(cfg: SynthConfig) -> tuple[GroundTruthInstance, ObservedDataset]:
    """Draw covariates, mask, and noisy observations for one instance.

    Row covariates are uniform on [0,1]^d1, column covariates on [0,1]^d2,
    entries observed independently with probability p, and observations carry
    additive centered Gaussian noise of standard deviation sigma. The returned
    dataset excludes the row covariates and the noiseless matrix.
    """
    alpha = cfg.seed.with_stage(STAGE_ROW_COVARIATES).rng().random((cfg.n, cfg.d1))
    beta = cfg.seed.with_stage(STAGE_COL_COVARIATES).rng().random((cfg.m, cfg.d2))
    grid = cfg.seed.with_stage(STAGE_MASK).rng().random((cfg.n, cfg.m)) < cfg.p
    f = truth_matrix(cfg, alpha, beta)
    x = f + cfg.sigma * normals(cfg.seed.with_stage(STAGE_NOISE).rng(), (cfg.n, cfg.m))
    smoothness = (
        FUNCTION_SMOOTHNESS[cfg.function_id]
        if cfg.function_id in FUNCTION_SMOOTHNESS
        else tuple(cfg.custom_smoothness)
    )
    truth = GroundTruthInstance(
        function_id=cfg.function_id,
        row_covariates=CovariateSet(alpha),
        col_covariates=CovariateSet(beta),
        f_matrix=f,
        smoothness=smoothness,
        custom_f=cfg.custom_f,
    )
    ds = ObservedDataset(
        mask=ObservationMask(grid),
        x=np.where(grid, x, 0.0),
        col_covariates=truth.col_covariates,
        sigma=cfg.sigma,
    )
    return truth, ds
