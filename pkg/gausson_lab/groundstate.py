"""Ground state of the action on the Nehari manifold.

Descent on S followed by the exact Nehari rescale u -> λu after every step,
so every iterate lies on {I = 0} and S(u) = ½‖u‖² there. The step halves
until the Armijo sufficient-decrease test holds.
"""

from __future__ import annotations

import asyncio
import logging
from dataclasses import dataclass, field
from functools import partial
from typing import List, Optional, Sequence

import numpy as np
from scipy.linalg import solveh_banded
from tqdm import tqdm

from .errors import ConfigError, DomainError
from .functionals import PhysParams, action_S, gausson, gradient_S, nehari_I, nehari_rescale
from .grid import Grid, GridFunction, inner_product, l2_norm, l2_norm_sq
from .operator import build_hamiltonian
from .orlicz import log_factor

logger = logging.getLogger(__name__)

METRICS = ("sobolev", "l2")
# accepted relative increase of S, roundoff in the quadratures
ACTION_SLACK = 1e-13
MIN_STEP = 1e-14
ARMIJO = 1e-4
DRIFT_THRESHOLD = 0.5


@dataclass(frozen=True)
class SolverSettings:
    step: float = 1.0
    tol: float = 1e-8
    max_iter: int = 20000
    symmetrize: Optional[bool] = None  # None: only when γ = 0
    seed: Optional[int] = None
    metric: str = "sobolev"

    def __post_init__(self):
        if not self.step > 0:
            raise ConfigError("step", f"must be positive, got {self.step}")
        if not self.tol > 0:
            raise ConfigError("tol", f"must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ConfigError("max_iter", f"must be >= 1, got {self.max_iter}")
        if self.metric not in METRICS:
            raise ConfigError("metric", f"must be one of {METRICS}, got {self.metric!r}")

    def symmetrize_for(self, gamma: float) -> bool:
        return gamma == 0 if self.symmetrize is None else self.symmetrize


@dataclass
class GroundStateResult:
    profile: GridFunction
    d_estimate: float
    iterations: int
    final_residual: float
    converged: bool
    max_nehari_defect: float = 0.0
    drift_flagged: bool = False
    action_history: List[float] = field(default_factory=list, repr=False)


def initial_guess(grid: Grid, seed: Optional[int] = None) -> GridFunction:
    """e^{-x²/2}, or a seeded random modulation of it for basin checks."""
    if seed is None:
        return grid.sample(lambda x: np.exp(-0.5 * x**2))
    rng = np.random.default_rng(seed)
    centres = rng.uniform(-2.0, 2.0, size=4)
    weights = rng.uniform(-0.3, 0.3, size=4)

    def guess(x):
        bumps = sum(w * np.exp(-((x - c) ** 2)) for w, c in zip(weights, centres))
        return np.exp(-0.5 * x**2) * (1.0 + bumps)

    return grid.sample(guess)


class _SobolevPreconditioner:
    """Solves (-D² + diag(1 + max(0, ω - 2 - Log|u|²))) d = g on the interior."""

    def __init__(self, grid: Grid, omega: float):
        self.h = grid.h
        self.omega = omega
        self.size = grid.n - 2

    def __call__(self, u: GridFunction, g: GridFunction) -> GridFunction:
        s = u.modulus[1:-1]
        potential = 1.0 + np.maximum(0.0, self.omega - 2.0 - log_factor(s))
        ab = np.empty((2, self.size))
        ab[0, 0] = 0.0
        ab[0, 1:] = -1.0 / self.h**2
        ab[1, :] = 2.0 / self.h**2 + potential
        values = np.zeros(u.grid.n, dtype=complex)
        values[1:-1] = solveh_banded(ab, g.values[1:-1])
        return g.with_values(values)


def sufficient_decrease(S: float, S_trial: float, step: float, slope: float) -> bool:
    """Armijo test S_trial <= S - c step slope, with ACTION_SLACK for roundoff in S."""
    return bool(np.isfinite(S_trial)) and S_trial <= S - ARMIJO * step * slope + ACTION_SLACK * abs(S)


def _mass_centre(u: GridFunction) -> float:
    mass = l2_norm_sq(u)
    return abs(u.grid.integrate(u.grid.x * u.modulus**2)) / mass


def solve_ground_state(
    p: PhysParams,
    grid: Grid,
    settings: SolverSettings = SolverSettings(),
    initial: Optional[GridFunction] = None,
) -> GroundStateResult:
    """Minimize S_{ω,γ} over the Nehari manifold starting from `initial` (default e^{-x²/2})."""
    p = p.unregularized()
    if p.gamma < 0:
        logger.warning("gamma=%g < 0: no minimizer exists, the run is exploratory", p.gamma)
    elif p.gamma == 0:
        logger.info("gamma=0: minimizer unique only up to translation")

    H = build_hamiltonian(grid, p.gamma)
    symmetrize = settings.symmetrize_for(p.gamma)
    precondition = _SobolevPreconditioner(grid, p.omega) if settings.metric == "sobolev" else None

    u = initial if initial is not None else initial_guess(grid, settings.seed)
    if symmetrize:
        u = u.even_part()
    _, u = nehari_rescale(u, p)
    S = action_S(u, p)
    history = [S]
    max_defect = abs(nehari_I(u, p)) / l2_norm_sq(u)
    drift_flagged = False

    converged = False
    residual = np.inf
    iterations = 0
    for iterations in range(1, settings.max_iter + 1):
        g = gradient_S(u, p, H)
        residual = l2_norm(g)
        if residual <= settings.tol:
            converged = True
            break
        direction = precondition(u, g) if precondition is not None else g
        slope = inner_product(g, direction).real

        step = settings.step
        while True:
            trial = u - step * direction
            if symmetrize:
                trial = trial.even_part()
            _, trial = nehari_rescale(trial, p)
            S_trial = action_S(trial, p)
            if sufficient_decrease(S, S_trial, step, slope):
                break
            step *= 0.5
            if step < MIN_STEP:
                break
        if step < MIN_STEP:
            logger.warning("descent stalled at residual %.3e after %d iterations", residual, iterations)
            break

        u, S = trial, S_trial
        history.append(S)
        max_defect = max(max_defect, abs(nehari_I(u, p)) / l2_norm_sq(u))
        if p.gamma < 0 and not drift_flagged and _mass_centre(u) > DRIFT_THRESHOLD:
            drift_flagged = True
            logger.warning("mass centre drifted beyond %.2f at iteration %d", DRIFT_THRESHOLD, iterations)
        if iterations % 100 == 0:
            logger.debug("iter %d: S=%.15g residual=%.3e step=%.3g", iterations, S, residual, step)

    if not converged:
        logger.warning("ground state not converged: residual %.3e after %d iterations", residual, iterations)

    # global phase: u(0) real positive
    phase = np.angle(u.at_origin) if abs(u.at_origin) > 0 else 0.0
    u = np.exp(-1j * phase) * u

    d_estimate = action_S(u, p)
    half_mass = 0.5 * l2_norm_sq(u)
    if abs(d_estimate - half_mass) > 1e-8 * abs(half_mass):
        logger.warning("S(profile)=%.15g differs from ½‖profile‖²=%.15g", d_estimate, half_mass)
    logger.info(
        "ground state omega=%g gamma=%g: d=%.12g iterations=%d residual=%.3e converged=%s",
        p.omega, p.gamma, d_estimate, iterations, residual, converged,
    )
    return GroundStateResult(
        profile=u,
        d_estimate=d_estimate,
        iterations=iterations,
        final_residual=float(residual),
        converged=converged,
        max_nehari_defect=float(max_defect),
        drift_flagged=drift_flagged,
        action_history=history,
    )


# ============================================================================
# CONTINUATION SWEEP
# ============================================================================


@dataclass(frozen=True)
class SweepRow:
    omega: float
    gamma: float
    d_estimate: float
    d_closed_form: float
    d_quadrature: float
    iterations: int
    converged: bool

    @property
    def within_bounds(self) -> bool:
        lower, upper = gausson(PhysParams(self.gamma, self.omega)).d_bounds()
        return lower < self.d_estimate < upper


SWEEP_COLUMNS = ("omega", "gamma", "d_estimate", "d_closed_form", "d_quadrature", "iterations", "converged")


def _sweep_row(omega: float, gammas: Sequence[float], grid: Grid, settings: SolverSettings, bar) -> List[SweepRow]:
    rows = []
    warm = None
    for gamma in gammas:
        p = PhysParams(gamma=gamma, omega=omega)
        result = solve_ground_state(p, grid, settings, initial=warm)
        warm = result.profile
        ref = gausson(p)
        rows.append(
            SweepRow(
                omega=omega,
                gamma=gamma,
                d_estimate=result.d_estimate,
                d_closed_form=ref.d_value,
                d_quadrature=0.5 * ref.mass_by_quadrature(),
                iterations=result.iterations,
                converged=result.converged,
            )
        )
        bar.update(1)
    return rows


async def _sweep_async(omegas, gammas, grid, settings, bar) -> List[List[SweepRow]]:
    loop = asyncio.get_running_loop()
    jobs = [
        loop.run_in_executor(None, partial(_sweep_row, omega, gammas, grid, settings, bar))
        for omega in omegas
    ]
    return await asyncio.gather(*jobs)


def continuation_sweep(
    omegas: Sequence[float],
    gammas: Sequence[float],
    grid: Grid,
    settings: SolverSettings = SolverSettings(),
    progress: bool = False,
) -> List[SweepRow]:
    """d_γ(ω) table; each ω row runs in a worker thread and warm-starts along γ."""
    if any(g <= 0 for g in gammas):
        raise DomainError(f"continuation sweep needs gamma > 0, got {list(gammas)}")
    with tqdm(total=len(omegas) * len(gammas), desc="sweep", disable=not progress) as bar:
        per_row = asyncio.run(_sweep_async(list(omegas), list(gammas), grid, settings, bar))
    rows = [row for block in per_row for row in block]
    failed = [r for r in rows if not r.converged]
    if failed:
        logger.warning("%d of %d sweep cells did not converge", len(failed), len(rows))
    return rows
