"""Render sweep summary CSVs: one mean-MSE line per method with a std band.

Input is the harness summary schema
`method,n,m,p,sigma,function,mse_mean,mse_std,trials`; nothing is recomputed
here, the plot shows exactly the aggregated values in the file.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

# stable ids and real text nodes make the SVG output reproducible and greppable
matplotlib.rcParams["svg.hashsalt"] = "mc-plots"
matplotlib.rcParams["svg.fonttype"] = "none"

REQUIRED_COLUMNS = ("method", "n", "m", "p", "sigma", "function",
                    "mse_mean", "mse_std", "trials")


class InputError(RuntimeError):
    """Unreadable or schema-violating summary file."""


class SpecError(ValueError):
    """Unusable plot request (bad axis, empty method filter)."""


@dataclass(frozen=True)
class PlotSpec:
    input_csv: str
    axis: str  # "n" or "p"
    output: str
    methods: tuple = ()  # empty tuple: plot every method present
    logy: bool = False
    png: bool = False

    def __post_init__(self):
        if self.axis not in ("n", "p"):
            raise SpecError(f"axis must be 'n' or 'p', got {self.axis!r}")


def read_summary(path):
    try:
        with open(path, encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            names = reader.fieldnames or []
            for col in REQUIRED_COLUMNS:
                if col not in names:
                    raise InputError(f"{path}: missing required column {col!r}")
            rows = list(reader)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise InputError(f"{path}: no data rows")
    return rows


def _series(rows, axis, methods):
    available = []
    for row in rows:
        if row["method"] not in available:
            available.append(row["method"])
    wanted = list(methods) if methods else available
    missing = [m for m in wanted if m not in available]
    if missing or not wanted:
        raise SpecError(
            f"no rows for methods {missing or '(none requested)'}; "
            f"available: {', '.join(available)}"
        )
    series = {}
    for method in wanted:
        pts = sorted(
            (float(r[axis]), float(r["mse_mean"]), float(r["mse_std"]))
            for r in rows
            if r["method"] == method
        )
        xs, means, stds = (np.array(col) for col in zip(*pts))
        series[method] = (xs, means, stds)
    return series


def render(spec: PlotSpec) -> str:
    """Write the figure; returns the output path."""
    rows = read_summary(spec.input_csv)
    series = _series(rows, spec.axis, spec.methods)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for method, (xs, means, stds) in series.items():
        ax.plot(xs, means, marker="o", label=method)
        lo, hi = means - stds, means + stds
        if spec.logy:
            lo = np.maximum(lo, np.finfo(float).tiny)
        ax.fill_between(xs, lo, hi, alpha=0.2)
    if spec.logy:
        ax.set_yscale("log")
    ax.set_xlabel(spec.axis)
    ax.set_ylabel("MSE")
    ax.legend()
    fig.tight_layout()
    if spec.png:
        fig.savefig(spec.output, format="png", dpi=150)
    else:
        fig.savefig(spec.output, format="svg", metadata={"Date": None})
    plt.close(fig)
    return spec.output
