"""Figure generation for kinrel artifacts; see `kinrel_plots.render`."""

from .render import FigureSpec, SchemaMismatch, render

__all__ = ["FigureSpec", "SchemaMismatch", "render"]
__version__ = "0.1.0"
