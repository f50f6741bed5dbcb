"""Static figures for corners-ensemble tables.

Consumes the CSV/JSON files written by the simulation toolkit's command
line interface and renders deterministic PNG figures.  No quantity is
recomputed here; the producing package is the single source of numeric
truth.
"""

from .figures import KINDS, FigureJob, boundary_polygon, qq_points, render
from .io import PlotInputError, SchemaError, load_rows, numeric_column, require_columns

__version__ = "0.1.0"

__all__ = [
    "FigureJob",
    "KINDS",
    "PlotInputError",
    "SchemaError",
    "__version__",
    "boundary_polygon",
    "load_rows",
    "numeric_column",
    "qq_points",
    "render",
    "require_columns",
]
