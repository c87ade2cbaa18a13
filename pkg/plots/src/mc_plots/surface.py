"""Convenience heatmaps of the built-in latent surfaces on a regular grid."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .render import SpecError

matplotlib.rcParams["svg.hashsalt"] = "mc-plots"
matplotlib.rcParams["svg.fonttype"] = "none"


def surface_values(function_id, grid_size=200):
    t = np.linspace(0.0, 1.0, grid_size)
    a, b = t[:, None], t[None, :]
    if function_id == "f1":
        return np.sin(5 * a) * np.sin(5 * b) + 0.05 * (np.sin(25 * a) * np.sin(25 * b)) ** 3
    if function_id == "f2":
        return np.sin(10 * a) * np.sin(4 * b) + 0.2 * (np.sin(40 * a) * np.sin(40 * b)) ** 3
    if function_id == "f3":
        return np.sin(3 + 6 * a + 4 * b**2)
    raise SpecError(f"unknown function id {function_id!r}")


def render_surface(function_id, output, png=False, grid_size=200):
    values = surface_values(function_id, grid_size)
    fig, ax = plt.subplots(figsize=(4.6, 4.0))
    im = ax.imshow(values, origin="lower", extent=(0, 1, 0, 1), aspect="auto")
    fig.colorbar(im, ax=ax)
    ax.set_xlabel("column covariate")
    ax.set_ylabel("row covariate")
    ax.set_title(function_id)
    fig.tight_layout()
    if png:
        fig.savefig(output, format="png", dpi=150)
    else:
        fig.savefig(output, format="svg", metadata={"Date": None})
    plt.close(fig)
    return output
