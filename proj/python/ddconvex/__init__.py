# SPDX-License-Identifier: Apache-2.0
"""Global optimisation of penalized least squares with decision-diagram convexification."""

from ._core import (
    DegenerateColumnError,
    DimensionError,
    Diagram,
    EnumerationOverflow,
    Error,
    IntervalError,
    NoPathError,
    ParameterError,
    ParseError,
    ScaleComponent,
    SchemaError,
    SeparationError,
    SolveReport,
    build_diagram,
    build_epigraph,
    interval_lower_bound,
    interval_upper_bound,
    is_member,
    load_csv,
    relative_gap,
    separate,
    solve,
    synth,
)

__all__ = [
    "DegenerateColumnError",
    "DimensionError",
    "Diagram",
    "EnumerationOverflow",
    "Error",
    "IntervalError",
    "NoPathError",
    "ParameterError",
    "ParseError",
    "ScaleComponent",
    "SchemaError",
    "SeparationError",
    "SolveReport",
    "build_diagram",
    "build_epigraph",
    "interval_lower_bound",
    "interval_upper_bound",
    "is_member",
    "load_csv",
    "relative_gap",
    "separate",
    "solve",
    "synth",
]

__version__ = "0.1.0"
