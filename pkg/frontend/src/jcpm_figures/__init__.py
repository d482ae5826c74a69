"""Publication-style figures from jcpm experiment CSVs.

This package is a pure consumer of the documented CSV contract: it computes
no physics and reads only named columns.
"""

__version__ = "0.1.0"

from .recipes import FIGURES, FigureError, FigureRecipe
from .render import render

__all__ = ["FIGURES", "FigureError", "FigureRecipe", "render"]
