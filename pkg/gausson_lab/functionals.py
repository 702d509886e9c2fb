"""Energy, action and Nehari functionals, their gradient, and the peak-Gausson reference."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.special import erfc

from .errors import DomainError
from .grid import Grid, GridFunction, l2_norm_sq
from .operator import DeltaHamiltonian, build_hamiltonian, quadratic_form
from .orlicz import RegLevel, log_factor, pointwise_nonlinearity, reg_entropy_density, young_A, young_B

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PhysParams:
    gamma: float
    omega: float
    reg: Optional[RegLevel] = None

    def unregularized(self) -> "PhysParams":
        return PhysParams(self.gamma, self.omega, None)


# ============================================================================
# ENTROPY AND THE THREE FUNCTIONALS
# ============================================================================


def entropy_integral(u: GridFunction, reg: Optional[RegLevel] = None) -> float:
    """∫|u|² Log|u|² as ∫B - ∫A, or the regularized entropy when reg is set."""
    s = u.modulus
    if reg is not None:
        return u.grid.integrate(reg_entropy_density(s, reg))
    return u.grid.integrate(young_B(s)) - u.grid.integrate(young_A(s))


def energy(u: GridFunction, p: PhysParams) -> float:
    return 0.5 * quadratic_form(u, u, p.gamma) - 0.5 * entropy_integral(u, p.reg)


def action_S(u: GridFunction, p: PhysParams) -> float:
    return energy(u, p) + 0.5 * (p.omega + 1.0) * l2_norm_sq(u)


def nehari_I(u: GridFunction, p: PhysParams) -> float:
    """<S'(u), u> = t_γ(u, u) + ω‖u‖² - ∫|u|² g(|u|)."""
    if p.reg is None:
        nonlinear = entropy_integral(u)
    else:
        s = u.modulus
        nonlinear = u.grid.integrate(s**2 * log_factor(s, p.reg))
    return quadratic_form(u, u, p.gamma) + p.omega * l2_norm_sq(u) - nonlinear


def gradient_S(u: GridFunction, p: PhysParams, H: Optional[DeltaHamiltonian] = None) -> GridFunction:
    """H u + ω u - f(u), the L² representative of S'(u); zero at the end nodes."""
    if H is None:
        H = build_hamiltonian(u.grid, p.gamma)
    values = H.apply(u).values + p.omega * u.values - pointwise_nonlinearity(u.values, p.reg)
    values[0] = values[-1] = 0.0
    return u.with_values(values)


def nehari_rescale(u: GridFunction, p: PhysParams) -> Tuple[float, GridFunction]:
    """λ = exp(I(u) / (2‖u‖²)) puts λu exactly on the Nehari manifold of the unregularized I."""
    mass = l2_norm_sq(u)
    if mass == 0.0:
        raise DomainError("Nehari rescaling needs a nonzero function")
    with np.errstate(over="ignore"):
        lam = float(np.exp(nehari_I(u, p.unregularized()) / (2.0 * mass)))
    return lam, lam * u


# ============================================================================
# PEAK-GAUSSON REFERENCE
# ============================================================================


@dataclass(frozen=True)
class GaussonReference:
    """Closed-form standing-wave profile e^{(ω+1)/2} e^{-(|x|+γ/2)²/2} and its constants."""

    gamma: float
    omega: float
    amplitude: float
    center_value: float
    mass: float
    d_value: float

    def profile(self, x):
        return self.amplitude * np.exp(-0.5 * (np.abs(x) + 0.5 * self.gamma) ** 2)

    def sample(self, grid: Grid) -> GridFunction:
        return grid.sample(self.profile)

    def one_sided_derivatives(self) -> Tuple[float, float]:
        """(φ'(0-), φ'(0+)) = (γ/2, -γ/2)·φ(0)."""
        slope = 0.5 * self.gamma * self.center_value
        return slope, -slope

    def mass_by_quadrature(self) -> float:
        scale = np.exp(self.omega + 1.0)
        half, _ = quad(lambda x: scale * np.exp(-((x + 0.5 * self.gamma) ** 2)), 0.0, np.inf, epsabs=0.0, epsrel=1e-13)
        return 2.0 * half

    def d_bounds(self) -> Tuple[float, float]:
        """(√(π/8) e^{ω+1} e^{-γ²/2}, (√π/2) e^{ω+1}); the lower one holds for γ > 0."""
        scale = np.exp(self.omega + 1.0)
        lower = np.sqrt(np.pi / 8.0) * scale * np.exp(-0.5 * self.gamma**2)
        upper = 0.5 * np.sqrt(np.pi) * scale
        return float(lower), float(upper)


def gausson(p: PhysParams) -> GaussonReference:
    amplitude = float(np.exp(0.5 * (p.omega + 1.0)))
    mass = float(np.sqrt(np.pi) * np.exp(p.omega + 1.0) * erfc(0.5 * p.gamma))
    ref = GaussonReference(
        gamma=p.gamma,
        omega=p.omega,
        amplitude=amplitude,
        center_value=amplitude * float(np.exp(-(p.gamma**2) / 8.0)),
        mass=mass,
        d_value=0.5 * mass,
    )
    quad_mass = ref.mass_by_quadrature()
    if abs(quad_mass - mass) > 1e-9 * mass:
        logger.warning("Gausson mass: closed form %.15g vs quadrature %.15g", mass, quad_mass)
    return ref


class Residual(NamedTuple):
    interior: float
    jump: float


def pointwise_residual(u: GridFunction, p: PhysParams) -> Residual:
    """Off-origin ODE defect max|-D²u + ωu - u Log|u|²| and the origin jump defect.

    The origin and its two neighbours are left out of the interior maximum; the
    jump defect compares one-sided differences with -γ u(0).
    """
    v = u.values
    h = u.grid.h
    o = u.grid.origin_index
    d2 = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / h**2
    defect = np.abs(-d2 + p.omega * v[1:-1] - pointwise_nonlinearity(v[1:-1]))
    mask = np.ones(defect.size, dtype=bool)
    # defect[k] belongs to node k + 1
    mask[o - 2 : o + 1] = False
    jump = (v[o + 1] - v[o]) / h - (v[o] - v[o - 1]) / h + p.gamma * v[o]
    return Residual(interior=float(np.max(defect[mask])), jump=float(abs(jump)))
