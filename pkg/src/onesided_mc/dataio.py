"""Dataset directory interchange format.

A dataset directory holds `header.json` (shape, sampling, noise, surface id,
seed) plus CSV bodies: `beta.csv` (one row per column covariate), `obs.csv`
(row,col,value triples), and optionally `alpha.csv` / `truth.csv` when ground
truth is included. All floats are written with 17 significant digits so files
round-trip bit-exactly.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .data import (
    CovariateSet,
    DataIOError,
    GroundTruthInstance,
    ObservationMask,
    ObservedDataset,
    SeedSpec,
)
from .synth import FUNCTION_SMOOTHNESS, SynthConfig

HEADER_NAME = "header.json"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_matrix(path, mat):
    with open(path, "w", encoding="utf-8") as fh:
        for row in np.atleast_2d(mat):
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _read_matrix(path):
    try:
        mat = np.loadtxt(path, delimiter=",", ndmin=2)
    except OSError as exc:
        raise DataIOError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise DataIOError(f"malformed CSV {path}: {exc}") from exc
    return mat


def write_dataset(path, cfg: SynthConfig, ds: ObservedDataset,
                  truth: GroundTruthInstance | None = None):
    """Write one dataset directory; includes ground truth files when given."""
    os.makedirs(path, exist_ok=True)
    header = {
        "n": ds.n,
        "m": ds.m,
        "d1": cfg.d1,
        "d2": cfg.d2,
        "p": cfg.p,
        "sigma": ds.sigma,
        "function_id": cfg.function_id,
        "seed": {"master": cfg.seed.master, "trial": cfg.seed.trial},
    }
    with open(os.path.join(path, HEADER_NAME), "w", encoding="utf-8") as fh:
        json.dump(header, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_matrix(os.path.join(path, "beta.csv"), ds.col_covariates.values)
    rows, cols, vals = ds.observed_values()
    with open(os.path.join(path, "obs.csv"), "w", encoding="utf-8") as fh:
        fh.write("row,col,value\n")
        for u, i, v in zip(rows, cols, vals):
            fh.write(f"{u},{i},{_fmt(v)}\n")
    if truth is not None:
        _write_matrix(os.path.join(path, "alpha.csv"), truth.row_covariates.values)
        _write_matrix(os.path.join(path, "truth.csv"), truth.f_matrix)


def read_dataset(path):
    """Read a dataset directory; returns (dataset, truth or None, header dict)."""
    header_path = os.path.join(path, HEADER_NAME)
    try:
        with open(header_path, encoding="utf-8") as fh:
            header = json.load(fh)
    except OSError as exc:
        raise DataIOError(f"cannot read {header_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataIOError(f"malformed header {header_path}: {exc}") from exc

    beta = _read_matrix(os.path.join(path, "beta.csv"))
    n, m = int(header["n"]), int(header["m"])
    if beta.shape != (m, int(header["d2"])):
        raise DataIOError(f"beta.csv shape {beta.shape} does not match header")

    obs_path = os.path.join(path, "obs.csv")
    grid = np.zeros((n, m), dtype=bool)
    x = np.zeros((n, m))
    try:
        with open(obs_path, encoding="utf-8") as fh:
            head = fh.readline().strip()
            if head != "row,col,value":
                raise DataIOError(f"{obs_path}: expected header 'row,col,value'")
            for lineno, line in enumerate(fh, start=2):
                line = line.strip()
                if not line:
                    continue
                parts = line.split(",")
                if len(parts) != 3:
                    raise DataIOError(f"{obs_path}:{lineno}: expected 3 fields")
                u, i, v = int(parts[0]), int(parts[1]), float(parts[2])
                if not (0 <= u < n and 0 <= i < m):
                    raise DataIOError(f"{obs_path}:{lineno}: index ({u},{i}) out of range")
                if grid[u, i]:
                    raise DataIOError(f"{obs_path}:{lineno}: duplicate entry ({u},{i})")
                grid[u, i] = True
                x[u, i] = v
    except OSError as exc:
        raise DataIOError(f"cannot read {obs_path}: {exc}") from exc
    except ValueError as exc:
        raise DataIOError(f"malformed CSV {obs_path}: {exc}") from exc

    col_cov = CovariateSet(beta)
    ds = ObservedDataset(ObservationMask(grid), x, col_cov, float(header["sigma"]))

    truth = None
    alpha_path = os.path.join(path, "alpha.csv")
    truth_path = os.path.join(path, "truth.csv")
    if os.path.exists(alpha_path) and os.path.exists(truth_path):
        alpha = _read_matrix(alpha_path)
        f = _read_matrix(truth_path)
        if f.shape != (n, m):
            raise DataIOError(f"truth.csv shape {f.shape} does not match header")
        fid = header.get("function_id", "custom")
        smoothness = FUNCTION_SMOOTHNESS.get(fid, (1.0, 1.0))
        truth = GroundTruthInstance(
            function_id=fid,
            row_covariates=CovariateSet(alpha),
            col_covariates=col_cov,
            f_matrix=f,
            smoothness=smoothness,
        )
    return ds, truth, header


def header_seed(header: dict) -> SeedSpec:
    seed = header.get("seed", {})
    return SeedSpec(int(seed.get("master", 0)), int(seed.get("trial", 0)))


def write_estimate(path, est_values):
    """Dense estimate as a headerless CSV matrix."""
    _write_matrix(path, est_values)


def write_distances(path, dists):
    """Pairwise squared-distance dump with columns u,v,dsq (upper triangle)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("u,v,dsq\n")
        n = dists.n
        for u in range(n):
            for v in range(u + 1, n):
                fh.write(f"{u},{v},{_fmt(dists.dsq[u, v])}\n")
