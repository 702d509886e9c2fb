"""Delta Hamiltonian H = -d^2/dx^2 - γ δ(x) on the Dirichlet box.

The point interaction enters through its quadratic form, which puts -γ/h on
the origin diagonal of the usual second-difference matrix. All solves act on
the interior block; the two end nodes stay at zero.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Tuple

import numpy as np
from scipy import fft, sparse
from scipy.integrate import quad
from scipy.interpolate import lagrange
from scipy.linalg import eigh_tridiagonal
from scipy.signal import lfilter
from scipy.sparse.linalg import splu

from .errors import ConvergenceError, DomainError
from .grid import Grid, GridFunction, l2_norm

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DeltaHamiltonian:
    """Symmetric tridiagonal (diag, offdiag) representation of H_γ on a grid."""

    grid: Grid
    gamma: float
    diag: np.ndarray = field(repr=False)
    offdiag: np.ndarray = field(repr=False)

    @cached_property
    def interior(self) -> sparse.csc_matrix:
        """Sparse matrix of the interior rows and columns (the Dirichlet block)."""
        d = self.diag[1:-1]
        off = self.offdiag[1:-1]
        return sparse.diags([off, d, off], [-1, 0, 1], format="csc")

    def apply(self, u: GridFunction) -> GridFunction:
        """H u on interior nodes, 0 on the boundary."""
        out = np.zeros(self.grid.n, dtype=complex)
        out[1:-1] = self.interior @ u.values[1:-1]
        return u.with_values(out)

    def energy(self, u: GridFunction) -> float:
        """<Hu, u> in the h-weighted pairing."""
        hu = self.interior @ u.values[1:-1]
        return float(self.grid.h * np.real(np.vdot(u.values[1:-1], hu)))


def build_hamiltonian(grid: Grid, gamma: float) -> DeltaHamiltonian:
    h = grid.h
    diag = np.full(grid.n, 2.0 / h**2)
    diag[grid.origin_index] -= gamma / h
    offdiag = np.full(grid.n - 1, -1.0 / h**2)
    return DeltaHamiltonian(grid=grid, gamma=float(gamma), diag=diag, offdiag=offdiag)


def quadratic_form(u: GridFunction, v: GridFunction, gamma: float) -> float:
    """Re Σ (u_{j+1}-u_j) conj(v_{j+1}-v_j) / h - γ Re u(0) conj(v(0))."""
    u._check(v)
    du = np.diff(u.values)
    dv = np.diff(v.values)
    kinetic = np.real(np.sum(du * np.conj(dv))) / u.grid.h
    point = gamma * np.real(u.at_origin * np.conj(v.at_origin))
    return float(kinetic - point)


def form_lower_bound(gamma: float) -> float:
    """m_γ with H_γ >= -m_γ: γ²/4 for an attractive delta, 0 otherwise."""
    return gamma**2 / 4.0 if gamma > 0 else 0.0


def form_norm_sq(u: GridFunction, gamma: float) -> float:
    """t_γ(u, u) + (m_γ + 1)‖u‖², a squared norm equivalent to H^1."""
    mass = l2_norm(u) ** 2
    return quadratic_form(u, u, gamma) + (form_lower_bound(gamma) + 1.0) * mass


def _inverse_iteration_shift(gamma: float) -> float:
    return -(gamma**2) / 4.0 - 0.1 if gamma > 0 else -0.1


def ground_eigenpair(
    H: DeltaHamiltonian, tol: float = 1e-10, max_iter: int = 5000
) -> Tuple[float, GridFunction]:
    """Smallest eigenvalue and unit eigenvector by shifted inverse iteration.

    Starts from e^{-|x|}; the eigenvector is signed so that its largest
    component is positive.
    """
    grid = H.grid
    h = grid.h
    A = H.interior
    shift = _inverse_iteration_shift(H.gamma)
    lu = splu((A - shift * sparse.identity(A.shape[0], format="csc")).tocsc())

    v = np.exp(-np.abs(grid.x[1:-1]))
    v /= np.sqrt(h * np.dot(v, v))
    lam, residual = np.nan, np.inf
    for it in range(1, max_iter + 1):
        w = lu.solve(v)
        v = w / np.sqrt(h * np.dot(w, w))
        Av = A @ v
        lam = h * np.dot(v, Av)
        residual = np.sqrt(h * np.sum((Av - lam * v) ** 2))
        if residual <= tol:
            logger.debug("inverse iteration converged in %d steps (residual %.3e)", it, residual)
            break
    else:
        raise ConvergenceError(
            f"inverse iteration stalled at residual {residual:.3e} after {max_iter} steps"
        )

    check = eigh_tridiagonal(H.diag[1:-1], H.offdiag[1:-1], eigvals_only=True, select="i", select_range=(0, 0))
    if abs(check[0] - lam) > 1e-6 * max(1.0, abs(lam)):
        logger.warning("inverse iteration eigenvalue %.12g differs from dense check %.12g", lam, check[0])

    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    values = np.zeros(grid.n, dtype=complex)
    values[1:-1] = v
    return float(lam), GridFunction(grid, values)


def _free_evolution(samples: np.ndarray, h: float, t: float) -> np.ndarray:
    """exp(it d²/dx²) on a zero-padded periodic window, symbol exp(-i k² t)."""
    n = samples.size
    padded = np.zeros(2 * n, dtype=complex)
    padded[:n] = samples
    k = 2.0 * np.pi * fft.fftfreq(2 * n, d=h)
    return fft.ifft(np.exp(-1j * k**2 * t) * fft.fft(padded))[:n]


def _memory_weights(a: float) -> np.ndarray:
    """∫_0^1 e^{-a(1-τ)} ℓ_j(τ) dτ for the cubic Lagrange basis on τ = -1, 0, 1, 2."""
    nodes = np.array([-1.0, 0.0, 1.0, 2.0])
    weights = np.empty(4)
    for j, basis in enumerate(lagrange(nodes, row) for row in np.eye(4)):
        weights[j] = quad(lambda tau: np.exp(-a * (1.0 - tau)) * basis(tau), 0.0, 1.0, epsabs=0.0, epsrel=1e-12)[0]
    return weights


def linear_propagator_oracle(u0: GridFunction, t: float, gamma: float) -> GridFunction:
    """e^{-itH_γ} u0 for a repulsive delta (γ < 0), built from the free propagator.

    The odd part of u0 does not see the delta and evolves freely. The even
    part, restricted to x >= 0, solves the free equation with the Robin
    condition u'(0+) = κ u(0), κ = -γ/2; it is extended to x < 0 by
    Φ(-y) = φ(y) + χ(y) with χ' + κχ = -2κφ, χ(0) = 0, which makes Φ' - κΦ
    odd, and the extension is then evolved freely.
    """
    if gamma >= 0:
        raise DomainError(f"propagator oracle needs gamma < 0, got {gamma}")
    grid = u0.grid
    h = grid.h
    kappa = -gamma / 2.0
    o = grid.origin_index

    even = u0.even_part().values
    odd = u0.values - even

    phi = even[o:]
    tail = min(grid.L + np.log(1e16) / kappa, 8.0 * grid.L)
    size = int(np.ceil(tail / h)) + 1
    phi_long = np.zeros(max(size, phi.size), dtype=complex)
    phi_long[: phi.size] = phi

    # χ_k = r χ_{k-1} - 2κh Σ_j w_j φ_{k-2+j}: exact exponential weights over a
    # cubic interpolant of φ, with φ_{-1} = φ_1 by evenness
    r = np.exp(-kappa * h)
    w = _memory_weights(kappa * h)
    m = phi_long.size
    p = np.concatenate([phi_long[1:2], phi_long, [0.0]])
    increments = sum(w[j] * p[j : j + m - 1] for j in range(4))
    forcing = np.concatenate([[0.0], -2.0 * kappa * h * increments])
    chi = lfilter([1.0], [1.0, -r], forcing)

    negative = (phi_long + chi)[::-1]
    extended = np.concatenate([negative[:-1], phi_long])
    centre = phi_long.size - 1
    evolved_even = _free_evolution(extended, h, t)[centre : centre + phi.size]

    out_even = np.concatenate([evolved_even[:0:-1], evolved_even])
    out_odd = _free_evolution(odd, h, t)

    values = out_even + out_odd
    values[0] = values[-1] = 0.0
    return GridFunction(grid, values)
