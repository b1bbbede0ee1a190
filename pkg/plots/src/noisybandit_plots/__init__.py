"""Figure rendering for noisybandit results files.

Consumes only the results.csv schema; never recomputes simulation
quantities. One image per panel, mean curves solid, worst-case dashed
where a figure calls for it.
"""

__version__ = "0.1.0"

from .figures import FIGURE_PRESETS, FigureSpec, PanelSpec, UnknownFigure, build_figures, figure_spec, render
from .reader import MissingSweepPoint, ResultsTable, SchemaMismatch, load_results

__all__ = [
    "FIGURE_PRESETS",
    "FigureSpec",
    "MissingSweepPoint",
    "PanelSpec",
    "ResultsTable",
    "SchemaMismatch",
    "UnknownFigure",
    "build_figures",
    "figure_spec",
    "load_results",
    "render",
]
