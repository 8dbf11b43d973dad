"""Rendering-only companion package: reads sweep CSV/manifest output and
draws publication-style line plots, fidelity panels, and entanglement maps."""

from .io import EXPECTED_SCHEMA, SweepData, load_sweep
from .render import FigureSpec, render

__all__ = ["EXPECTED_SCHEMA", "SweepData", "load_sweep", "FigureSpec", "render"]
