"""Figure rendering for the two-level resonance simulator's file outputs."""

from .figures import (
    FigureSpec,
    plot_complex_time_map,
    plot_phase_diagram,
    plot_pulse_contour,
)
from .schema import (
    ContourTable,
    DynEpsRecords,
    SchemaError,
    SeparatrixCurve,
    SplitField,
    SweepTable,
    read_contour,
    read_dyn_eps,
    read_field,
    read_separatrix,
    read_sweep,
)

__all__ = [
    "FigureSpec", "plot_complex_time_map", "plot_phase_diagram",
    "plot_pulse_contour",
    "ContourTable", "DynEpsRecords", "SchemaError", "SeparatrixCurve",
    "SplitField", "SweepTable", "read_contour", "read_dyn_eps", "read_field",
    "read_separatrix", "read_sweep",
]

__version__ = "0.1.0"
