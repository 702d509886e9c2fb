"""Analytic identity suite behind the `verify` subcommand."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import List

import numpy as np

from .config import ExperimentConfig
from .functionals import PhysParams, action_S, energy, gausson, nehari_I, nehari_rescale, pointwise_residual
from .grid import Grid, GridFunction, h1_norm_sq, l2_norm_sq
from .orlicz import E3, luxemburg_norm, log_sobolev_gap, sandwich, trace_bound_gap, young_A, young_A_prime

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    threshold: float

    def as_row(self) -> dict:
        return asdict(self)


CHECK_COLUMNS = ("name", "passed", "value", "threshold")


def _at_most(name: str, value: float, threshold: float) -> Check:
    return Check(name, bool(value <= threshold), float(value), float(threshold))


def _test_function(grid: Grid, seed: int) -> GridFunction:
    """Two complex Gaussian bumps with a seeded layout."""
    rng = np.random.default_rng(seed)
    centres = rng.uniform(-2.0, 2.0, size=2)
    widths = rng.uniform(0.5, 2.0, size=2)
    coeffs = rng.uniform(0.2, 3.0, size=2) * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=2))
    k = rng.uniform(-2.0, 2.0)

    def bumps(x):
        envelope = sum(c * np.exp(-0.5 * ((x - x0) / w) ** 2) for c, x0, w in zip(coeffs, centres, widths))
        return envelope * np.exp(1j * k * x)

    return grid.sample(bumps)


def gausson_checks(p: PhysParams, grid: Grid) -> List[Check]:
    ref = gausson(p)
    phi = ref.sample(grid)
    residual = pointwise_residual(phi, p)
    mass = l2_norm_sq(phi)
    checks = [
        _at_most("gausson interior residual", residual.interior, 1e-3),
        _at_most("gausson jump defect", residual.jump, 5e-2),
        _at_most("nehari I(phi) / |phi|^2", abs(nehari_I(phi, p.unregularized())) / mass, 1e-2),
        _at_most("mass closed form vs quadrature", abs(ref.mass - ref.mass_by_quadrature()) / ref.mass, 1e-10),
    ]
    if p.gamma > 0:
        lower, upper = ref.d_bounds()
        checks.append(Check("d lower bound", bool(lower < ref.d_value), ref.d_value - lower, 0.0))
        checks.append(Check("d upper bound", bool(ref.d_value < upper), upper - ref.d_value, 0.0))
    return checks


def identity_checks(p: PhysParams, grid: Grid, seed: int) -> List[Check]:
    p0 = p.unregularized()
    u = _test_function(grid, seed)
    mass = l2_norm_sq(u)
    E = energy(u, p0)
    scale = max(1.0, abs(E), mass)
    _, on_manifold = nehari_rescale(u, p0)
    return [
        _at_most("S = E + (omega+1)/2 Q", abs(action_S(u, p0) - E - 0.5 * (p.omega + 1.0) * mass) / scale, 1e-12),
        _at_most("I = 2E + omega Q", abs(nehari_I(u, p0) - 2.0 * E - p.omega * mass) / scale, 1e-12),
        _at_most("nehari rescale zeroes I", abs(nehari_I(on_manifold, p0)) / l2_norm_sq(on_manifold), 1e-10),
    ]


def orlicz_checks(p: PhysParams, grid: Grid, seed: int) -> List[Check]:
    lo, hi = E3 * (1 - 1e-15), E3 * (1 + 1e-15)
    u = _test_function(grid, seed)
    n1 = luxemburg_norm(u)
    n2 = luxemburg_norm(2.5 * u)
    low, value, up = sandwich(u)
    checks = [
        _at_most("A continuity at e^-3", abs(young_A(hi) - young_A(lo)) / (6 * E3**2), 1e-12),
        _at_most("A(e^-3) = 6e^-6", abs(young_A(E3) - 6 * E3**2) / (6 * E3**2), 1e-12),
        _at_most("A' continuity at e^-3", abs(young_A_prime(hi) - young_A_prime(lo)) / (10 * E3), 1e-12),
        _at_most("Luxemburg homogeneity", abs(n2 - 2.5 * n1) / n2, 1e-8),
        Check("Orlicz sandwich", bool(low * (1 - 1e-9) <= value <= up * (1 + 1e-9)), value, up),
        Check("log-Sobolev gap", bool(log_sobolev_gap(u, 1.0) >= -1e-8 * h1_norm_sq(u)), log_sobolev_gap(u, 1.0), 0.0),
    ]
    if p.gamma > 0:
        gap = trace_bound_gap(u, p.gamma)
        checks.append(Check("trace bound gap", bool(gap >= -1e-6), gap, 0.0))
    return checks


def run_identity_suite(config: ExperimentConfig) -> List[Check]:
    p = config.params()
    grid = config.grid()
    checks = gausson_checks(p, grid) + identity_checks(p, grid, config.seed) + orlicz_checks(p, grid, config.seed)
    failed = [c.name for c in checks if not c.passed]
    if failed:
        logger.warning("identity suite: %d failed (%s)", len(failed), ", ".join(failed))
    return checks
