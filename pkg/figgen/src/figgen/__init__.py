"""Figure rendering for steerlab experiment CSVs."""

from .render import FigureSpec, SchemaError, render, render_all

__all__ = ["FigureSpec", "SchemaError", "render", "render_all"]
__version__ = "0.1.0"
