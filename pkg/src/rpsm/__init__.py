"""Residual power series solutions of multi-pantograph delay differential systems."""

from .builtin import example
from .expression import parse, render
from .problem import InitialValueSpec, PantographSystem, load_problem, validate_system
from .series import TruncatedSeries
from .solver import RpsmSolution, residual_series, solve, taylor_of_exact

__all__ = [
    "example",
    "parse",
    "render",
    "InitialValueSpec",
    "PantographSystem",
    "load_problem",
    "validate_system",
    "TruncatedSeries",
    "RpsmSolution",
    "residual_series",
    "solve",
    "taylor_of_exact",
]

__version__ = "0.1.0"
