"""Render publication-style figures from dickebh CSV outputs."""

__version__ = "0.1.0"

from .render import FigureJob, RenderInfo, SchemaError, render, render_multi_panel

__all__ = ["FigureJob", "RenderInfo", "SchemaError", "render", "render_multi_panel"]
