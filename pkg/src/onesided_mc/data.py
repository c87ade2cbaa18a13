"""Core data containers: covariates, observation masks, datasets, seeded RNG streams.

Everything here is immutable after construction, so instances can be shared
freely across worker processes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.special import ndtri

_MASK64 = (1 << 64) - 1

# Stream labels: each consumer of randomness owns an independent substream so
# that adding or removing one consumer never perturbs the draws of another.
STAGE_ROW_COVARIATES = 0
STAGE_COL_COVARIATES = 1
STAGE_MASK = 2
STAGE_NOISE = 3
STAGE_SPLIT = 4
STAGE_HOLDOUT = 5
STAGE_FACTOR_INIT = 6


class ConfigError(ValueError):
    """Invalid configuration (unknown keys, out-of-range values, bad method names)."""


class DataIOError(RuntimeError):
    """Missing or malformed dataset/result files."""


@dataclass(frozen=True)
class SeedSpec:
    """Key for a counter-based RNG stream: master seed plus a (trial, stage) id.

    Identical SeedSpec values produce identical draws on every platform; the
    stream is Philox keyed through a SeedSequence, and normal variates are
    produced by inverse-CDF of the uniform stream (see `normals`).
    """

    master: int
    trial: int = 0
    stage: int = 0

    def rng(self) -> np.random.Generator:
        seq = np.random.SeedSequence(
            entropy=self.master & _MASK64, spawn_key=(self.trial, self.stage)
        )
        return np.random.Generator(np.random.Philox(seq))

    def with_trial(self, trial: int) -> "SeedSpec":
        return replace(self, trial=trial)

    def with_stage(self, stage: int) -> "SeedSpec":
        return replace(self, stage=stage)

    def child(self, *tags: int) -> "SeedSpec":
        """Derive an independent master seed from integer tags (axis values etc.)."""
        seq = np.random.SeedSequence(
            entropy=[self.master & _MASK64] + [int(t) & _MASK64 for t in tags]
        )
        return SeedSpec(int(seq.generate_state(2, np.uint64)[0]), self.trial, self.stage)


def normals(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard normals via inverse-CDF of uniform draws.

    The uniform double stream is stable across platforms and numpy versions,
    unlike the ziggurat sampler, so fixtures generated here are portable.
    """
    u = np.maximum(rng.random(shape), 1e-300)  # guard ndtri(0) = -inf
    return ndtri(u)


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class CovariateSet:
    """Points in the unit hypercube, one per row (or column) of the matrix."""

    values: np.ndarray  # (count, dim)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim == 1:
            vals = vals[:, None]
        if vals.ndim != 2:
            raise ValueError("covariates must be a (count, dim) array")
        if vals.size and (vals.min() < 0.0 or vals.max() > 1.0):
            raise ValueError("covariates must lie in [0, 1]")
        object.__setattr__(self, "values", _freeze(vals))

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class ObservationMask:
    """Which (row, col) entries of an n x m matrix are observed.

    Stored as a dense boolean grid, which at the scales handled here gives
    O(1) membership tests and cheap per-row iteration at once.
    """

    grid: np.ndarray  # (n, m) bool

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=bool)
        if grid.ndim != 2:
            raise ValueError("mask grid must be 2-d")
        object.__setattr__(self, "grid", _freeze(grid))

    @classmethod
    def from_entries(cls, entries, n: int, m: int) -> "ObservationMask":
        grid = np.zeros((n, m), dtype=bool)
        for u, i in entries:
            if not (0 <= u < n and 0 <= i < m):
                raise ValueError(f"entry ({u}, {i}) out of range for {n}x{m}")
            if grid[u, i]:
                raise ValueError(f"duplicate entry ({u}, {i})")
            grid[u, i] = True
        return cls(grid)

    @property
    def n(self) -> int:
        return self.grid.shape[0]

    @property
    def m(self) -> int:
        return self.grid.shape[1]

    @property
    def count(self) -> int:
        return int(self.grid.sum())

    def contains(self, u: int, i: int) -> bool:
        return bool(self.grid[u, i])

    def row_cols(self, u: int) -> np.ndarray:
        """Sorted observed column indices of row u."""
        return np.flatnonzero(self.grid[u])

    def entries(self) -> np.ndarray:
        """All observed (row, col) pairs in row-major order, shape (count, 2)."""
        rows, cols = np.nonzero(self.grid)
        return np.column_stack([rows, cols])


@dataclass(frozen=True)
class ObservedDataset:
    """Sparse noisy observations plus the column covariates.

    `x` is dense with zeros off the mask; `sigma` is the (known) noise standard
    deviation. Row covariates are deliberately absent: estimators never see them.
    """

    mask: ObservationMask
    x: np.ndarray  # (n, m), zero wherever unobserved
    col_covariates: CovariateSet
    sigma: float

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        if x.shape != self.mask.grid.shape:
            raise ValueError("values and mask shapes differ")
        if len(self.col_covariates) != self.mask.m:
            raise ValueError("need one column covariate per column")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        x = np.where(self.mask.grid, x, 0.0)
        object.__setattr__(self, "x", _freeze(x))

    @property
    def n(self) -> int:
        return self.mask.n

    @property
    def m(self) -> int:
        return self.mask.m

    def observed_values(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        rows, cols = np.nonzero(self.mask.grid)
        return rows, cols, self.x[rows, cols]

    def content_hash(self) -> str:
        import hashlib

        h = hashlib.sha256()
        h.update(self.mask.grid.tobytes())
        h.update(self.x.tobytes())
        h.update(self.col_covariates.values.tobytes())
        h.update(np.float64(self.sigma).tobytes())
        return h.hexdigest()


@dataclass(frozen=True)
class GroundTruthInstance:
    """Latent function id, both covariate sets, and the dense noiseless matrix.

    Only generators, evaluation code, and oracle baselines may touch this.
    `smoothness` is the declared (exponent, constant) pair of the max-norm
    modulus-of-continuity bound |f(x) - f(x')| <= L * ||x - x'||_inf^lam.
    """

    function_id: str
    row_covariates: CovariateSet
    col_covariates: CovariateSet
    f_matrix: np.ndarray  # (n, m)
    smoothness: tuple[float, float]  # (lam, L)
    custom_f: object = None

    def __post_init__(self):
        f = np.asarray(self.f_matrix, dtype=np.float64)
        if f.shape != (len(self.row_covariates), len(self.col_covariates)):
            raise ValueError("f_matrix shape must match covariate counts")
        object.__setattr__(self, "f_matrix", _freeze(f))

    @property
    def n(self) -> int:
        return self.f_matrix.shape[0]

    @property
    def m(self) -> int:
        return self.f_matrix.shape[1]


@dataclass(frozen=True)
class DenseEstimate:
    """A dense n x m estimate of the ground-truth matrix, tagged by method."""

    values: np.ndarray
    method: str

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if not np.all(np.isfinite(vals)):
            raise ValueError("estimate has non-finite entries")
        object.__setattr__(self, "values", _freeze(vals))


def split_mask(
    ds: ObservedDataset, seed: SeedSpec, enabled: bool = False
) -> tuple[ObservedDataset, ObservedDataset]:
    """Randomly partition the observed entries into two halves.

    Each observed entry lands in the first output with probability 1/2,
    independently; the two outputs partition the mask. When disabled (the
    default used by the experiment pipeline) both outputs alias the input.
    """
    if not enabled:
        return ds, ds
    rng = seed.with_stage(STAGE_SPLIT).rng()
    coin = rng.random(ds.mask.grid.shape) < 0.5
    grid_a = ds.mask.grid & coin
    grid_b = ds.mask.grid & ~coin
    ds_a = ObservedDataset(ObservationMask(grid_a), ds.x, ds.col_covariates, ds.sigma)
    ds_b = ObservedDataset(ObservationMask(grid_b), ds.x, ds.col_covariates, ds.sigma)
    return ds_a, ds_b
