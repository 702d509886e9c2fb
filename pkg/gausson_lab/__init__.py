"""Numerical lab for the logarithmic Schrödinger equation with a delta potential."""

from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    GaussonLabError,
    GridError,
    IntegrationAbort,
    RegularizationError,
)
from .grid import Grid, GridFunction, make_grid

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "GaussonLabError",
    "Grid",
    "GridError",
    "GridFunction",
    "IntegrationAbort",
    "RegularizationError",
    "make_grid",
]
