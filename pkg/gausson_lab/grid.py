"""Uniform 1D grid on [-L, L] with a node at the origin, and grid functions on it.

The end nodes carry homogeneous Dirichlet data: `Grid.sample` zeroes them,
and the operator / integrator only ever move the interior nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Union

import numpy as np
from scipy.integrate import trapezoid

from .errors import GridError


@dataclass(frozen=True)
class Grid:
    """Uniform mesh x_j = -L + j*h, j = 0..n-1, with odd n so that x[(n-1)/2] = 0."""

    L: float
    n: int

    def __post_init__(self):
        if not self.L > 0:
            raise GridError(f"half-width L must be positive, got {self.L}")
        if self.n < 3:
            raise GridError(f"node count n must be >= 3, got {self.n}")
        if self.n % 2 == 0:
            raise GridError(f"node count n must be odd so x=0 is a node, got {self.n}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / (self.n - 1)

    @property
    def origin_index(self) -> int:
        return (self.n - 1) // 2

    @cached_property
    def x(self) -> np.ndarray:
        x = -self.L + self.h * np.arange(self.n)
        # pin the symmetric nodes exactly
        x[self.origin_index] = 0.0
        x[-1] = self.L
        return x

    def refine(self) -> "Grid":
        """Halve the spacing; the origin stays a node."""
        return Grid(self.L, 2 * self.n - 1)

    def integrate(self, samples: np.ndarray) -> float:
        """Trapezoid rule sum h*(g_j + g_{j+1})/2."""
        return float(trapezoid(samples, dx=self.h))

    def sample(self, f: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        """Sample f on the nodes and impose the Dirichlet end values."""
        values = np.array(f(self.x), dtype=complex)
        values[0] = values[-1] = 0.0
        return GridFunction(self, values)

    def zeros(self) -> "GridFunction":
        return GridFunction(self, np.zeros(self.n, dtype=complex))


def make_grid(L: float, n: int) -> Grid:
    return Grid(float(L), int(n))


Scalar = Union[int, float, complex]


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex samples of a function on a Grid."""

    grid: Grid
    values: np.ndarray

    # numpy scalars defer to __rmul__
    __array_ufunc__ = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.n,):
            raise GridError(f"expected {self.grid.n} samples, got shape {values.shape}")
        object.__setattr__(self, "values", values)

    def _check(self, other: "GridFunction"):
        if other.grid != self.grid:
            raise GridError("grid functions live on different grids")

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check(other)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        self._check(other)
        return GridFunction(self.grid, self.values - other.values)

    def __neg__(self) -> "GridFunction":
        return GridFunction(self.grid, -self.values)

    def __mul__(self, c: Scalar) -> "GridFunction":
        return GridFunction(self.grid, c * self.values)

    __rmul__ = __mul__

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(self.grid, values)

    @property
    def modulus(self) -> np.ndarray:
        return np.abs(self.values)

    @property
    def at_origin(self) -> complex:
        return complex(self.values[self.grid.origin_index])

    def reflected(self) -> "GridFunction":
        """u(-x)."""
        return GridFunction(self.grid, self.values[::-1].copy())

    def even_part(self) -> "GridFunction":
        return GridFunction(self.grid, 0.5 * (self.values + self.values[::-1]))


def integrate(g: Union[GridFunction, np.ndarray], grid: Grid = None) -> float:
    """Trapezoid integral of real samples (the real part of a GridFunction)."""
    if isinstance(g, GridFunction):
        return g.grid.integrate(g.values.real)
    if grid is None:
        raise GridError("raw samples need an explicit grid")
    return grid.integrate(np.asarray(g, dtype=float))


def inner_product(u: GridFunction, v: GridFunction) -> complex:
    """Trapezoid approximation of the integral of u * conj(v)."""
    u._check(v)
    prod = u.values * np.conj(v.values)
    return complex(trapezoid(prod, dx=u.grid.h))


def l2_norm_sq(u: GridFunction) -> float:
    return u.grid.integrate(np.abs(u.values) ** 2)


def h1_seminorm_sq(u: GridFunction) -> float:
    """Forward-difference Dirichlet form sum |u_{j+1} - u_j|^2 / h."""
    return float(np.sum(np.abs(np.diff(u.values)) ** 2) / u.grid.h)


def h1_norm_sq(u: GridFunction) -> float:
    return l2_norm_sq(u) + h1_seminorm_sq(u)


def l2_norm(u: GridFunction) -> float:
    return float(np.sqrt(l2_norm_sq(u)))


def sup_norm(u: GridFunction) -> float:
    return float(np.max(np.abs(u.values)))
