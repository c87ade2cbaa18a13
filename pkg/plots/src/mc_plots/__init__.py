"""Figure rendering for sweep summary CSVs."""

from .render import InputError, PlotSpec, SpecError, read_summary, render
from .surface import render_surface, surface_values

__all__ = [
    "InputError",
    "PlotSpec",
    "SpecError",
    "read_summary",
    "render",
    "render_surface",
    "surface_values",
]
