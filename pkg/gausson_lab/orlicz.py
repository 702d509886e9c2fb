"""Young function A, the entropy split B = F + A, the regularized log nonlinearity,
the Luxemburg norm of L^A and the energy-space norm of W = H^1 ∩ L^A.

All pointwise functions accept scalars or numpy arrays and return the same shape.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, RegularizationError
from .grid import GridFunction, h1_norm_sq, h1_seminorm_sq, l2_norm, l2_norm_sq

logger = logging.getLogger(__name__)

E3 = float(np.exp(-3.0))
E6 = float(np.exp(-6.0))
# amplitudes below this contribute their limit value 0
TINY = 1e-300


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def _log(s):
    return np.log(np.maximum(s, TINY))


def young_A(s):
    """A(s) = -s^2 Log s^2 on [0, e^-3], 3s^2 + 4e^-3 s - e^-6 above."""
    s = np.asarray(s, dtype=float)
    small = np.where(s > TINY, -2.0 * s**2 * _log(s), 0.0)
    large = 3.0 * s**2 + 4.0 * E3 * s - E6
    return _out(np.where(s <= E3, small, large))


def young_A_prime(s):
    s = np.asarray(s, dtype=float)
    small = np.where(s > TINY, -4.0 * s * _log(s) - 2.0 * s, 0.0)
    large = 6.0 * s + 4.0 * E3
    return _out(np.where(s <= E3, small, large))


def entropy_F(s):
    """F(s) = s^2 Log s^2, with F(0) = 0."""
    s = np.asarray(s, dtype=float)
    return _out(np.where(s > TINY, 2.0 * s**2 * _log(s), 0.0))


def young_B(s):
    return _out(np.asarray(entropy_F(s)) + np.asarray(young_A(s)))


@dataclass(frozen=True)
class EntropySplit:
    A_val: float
    B_val: float
    F_val: float


def entropy_split(s: float) -> EntropySplit:
    if s < 0:
        raise DomainError(f"entropy split needs s >= 0, got {s}")
    a = young_A(s)
    b = young_B(s)
    return EntropySplit(A_val=a, B_val=b, F_val=b - a)


@dataclass(frozen=True)
class RegLevel:
    """Regularization threshold m: the log is clamped below 1/m and tamed above m."""

    m: float = 1e8

    def __post_init__(self):
        if not self.m >= np.exp(3.0):
            raise RegularizationError(f"regularization level m must be >= e^3, got {self.m}")

    @property
    def log_m(self) -> float:
        return float(np.log(self.m))


def _a_real(s):
    # a(s) = A(s)/s for s > 0
    s = np.asarray(s, dtype=float)
    safe = np.maximum(s, TINY)
    small = np.where(s > TINY, -2.0 * s * _log(s), 0.0)
    large = 3.0 * s + 4.0 * E3 - E6 / safe
    return np.where(s <= E3, small, large)


def _b_real(s):
    s = np.asarray(s, dtype=float)
    safe = np.maximum(s, TINY)
    large = 2.0 * s * _log(s) + 3.0 * s + 4.0 * E3 - E6 / safe
    return np.where(s <= E3, 0.0, large)


def _reg_a_real(s, reg: RegLevel):
    s = np.asarray(s, dtype=float)
    return np.where(s >= 1.0 / reg.m, _a_real(s), 2.0 * reg.log_m * s)


def _reg_b_real(s, reg: RegLevel):
    s = np.asarray(s, dtype=float)
    return np.where(s <= reg.m, _b_real(s), s / reg.m * _b_real(reg.m))


def _radial(z, radial_part):
    # z/|z| * radial_part(|z|), 0 at z = 0
    z = np.asarray(z, dtype=complex)
    s = np.abs(z)
    unit = np.where(s > TINY, z / np.maximum(s, TINY), 0.0)
    return unit * radial_part(s)


def young_a(z):
    """a(z) = z/|z|^2 A(|z|)."""
    return _radial(z, _a_real)


def young_b(z):
    """b(z) = z/|z|^2 B(|z|)."""
    return _radial(z, _b_real)


def reg_a(z, reg: RegLevel):
    return _radial(z, lambda s: _reg_a_real(s, reg))


def reg_b(z, reg: RegLevel):
    return _radial(z, lambda s: _reg_b_real(s, reg))


def log_factor(s, reg: Optional[RegLevel] = None):
    """Real g with f(z) = z g(|z|): Log s^2, or its regularized version b_m/s - a_m/s."""
    s = np.asarray(s, dtype=float)
    if reg is None:
        return _out(np.where(s > TINY, 2.0 * _log(s), 0.0))
    lo = -2.0 * reg.log_m
    band = 2.0 * _log(s)
    # only used where s >= m
    safe = np.maximum(s, reg.m)
    top = float(_b_real(reg.m)) / reg.m - (3.0 + 4.0 * E3 / safe - E6 / safe**2)
    g = np.where(s <= 1.0 / reg.m, lo, np.where(s < reg.m, band, top))
    return _out(g)


def pointwise_nonlinearity(z, reg: Optional[RegLevel] = None):
    """z Log|z|^2 (0 at z = 0), or f_m(z) = b_m(z) - a_m(z) when reg is given."""
    z = np.asarray(z, dtype=complex)
    out = z * log_factor(np.abs(z), reg)
    return complex(out) if out.ndim == 0 else out


def _int_a(s, reg: RegLevel):
    # closed-form integral of a_m over [0, s]
    s1 = 1.0 / reg.m
    lm = reg.log_m

    def g2(t):
        return -(t**2) * _log(t) + 0.5 * t**2

    def g3(t):
        return 1.5 * t**2 + 4.0 * E3 * t - E6 * _log(t)

    low = lm * s**2
    mid = lm * s1**2 + g2(s) - g2(s1)
    high = lm * s1**2 + g2(E3) - g2(s1) + g3(s) - g3(E3)
    return np.where(s <= s1, low, np.where(s <= E3, mid, high))


def _int_b(s, reg: RegLevel):
    # closed-form integral of b_m over [0, s]
    m = reg.m

    def k(t):
        return t**2 * _log(t) + t**2 + 4.0 * E3 * t - E6 * _log(t)

    mid = k(s) - k(E3)
    high = k(m) - k(E3) + float(_b_real(m)) * (s**2 - m**2) / (2.0 * m)
    return np.where(s <= E3, 0.0, np.where(s <= m, mid, high))


def reg_potentials(s, reg: RegLevel) -> Tuple[float, float]:
    """(Phi_m, Psi_m) = (1/2 ∫_0^s a_m, 1/2 ∫_0^s b_m)."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise DomainError("potentials are defined for s >= 0")
    return _out(0.5 * _int_a(s, reg)), _out(0.5 * _int_b(s, reg))


def reg_entropy_density(s, reg: RegLevel):
    """4(Psi_m - Phi_m)(s) + s^2.

    Equals s^2 Log s^2 + 1/m^2 on 1/m <= s <= m; its derivative is
    2 s (g_m(s) + 1), so it is the density whose gradient is the regularized
    nonlinearity.
    """
    s = np.asarray(s, dtype=float)
    return _out(2.0 * (_int_b(s, reg) - _int_a(s, reg)) + s**2)


def luxemburg_norm(u: GridFunction, rtol: float = 1e-10) -> float:
    """inf{k > 0 : ∫A(|u|/k) <= 1}, root-bracketed in log k."""
    s = u.modulus
    if not np.any(s > 0):
        return 0.0
    grid = u.grid

    def excess(log_k: float) -> float:
        return grid.integrate(young_A(s * np.exp(-log_k))) - 1.0

    lo = hi = float(np.log(np.max(s)))
    step = np.log(2.0)
    while excess(lo) <= 0:
        lo -= step
        step *= 2.0
    step = np.log(2.0)
    while excess(hi) > 0:
        hi += step
        step *= 2.0
    return float(np.exp(brentq(excess, lo, hi, xtol=rtol)))


def w_norm(u: GridFunction) -> float:
    """‖u‖_H1 + ‖u‖_LA."""
    return float(np.sqrt(h1_norm_sq(u))) + luxemburg_norm(u)


def sandwich(u: GridFunction) -> Tuple[float, float, float]:
    """(min(N, N^2), ∫A(|u|), max(N, N^2)) with N the Luxemburg norm."""
    n = luxemburg_norm(u)
    value = u.grid.integrate(young_A(u.modulus))
    return min(n, n * n), value, max(n, n * n)


def log_sobolev_gap(f: GridFunction, alpha: float) -> float:
    """RHS - LHS of ∫|f|^2 Log|f|^2 <= (α^2/π)‖f'‖^2 + (Log‖f‖^2 - (1 + Log α))‖f‖^2."""
    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    mass = l2_norm_sq(f)
    if mass == 0.0:
        raise DomainError("log-Sobolev inequality needs f != 0")
    s = f.modulus
    lhs = f.grid.integrate(young_B(s)) - f.grid.integrate(young_A(s))
    rhs = alpha**2 / np.pi * h1_seminorm_sq(f) + (np.log(mass) - (1.0 + np.log(alpha))) * mass
    return float(rhs - lhs)


def trace_bound_gap(u: GridFunction, gamma: float) -> float:
    """γ^2‖u‖^2 + ‖u'‖^2 - 2γ|u(0)|^2."""
    if gamma <= 0:
        raise DomainError(f"trace bound needs gamma > 0, got {gamma}")
    return float(gamma**2 * l2_norm_sq(u) + h1_seminorm_sq(u) - 2.0 * gamma * abs(u.at_origin) ** 2)


def key_inequality_ratio(u: GridFunction, v: GridFunction) -> float:
    """∫|B(|u|) - B(|v|)| / ((1 + ‖u‖²_H1 + ‖v‖²_H1) ‖u - v‖)."""
    dist = l2_norm(u - v)
    if dist == 0.0:
        return 0.0
    num = u.grid.integrate(np.abs(young_B(u.modulus) - young_B(v.modulus)))
    return float(num / ((1.0 + h1_norm_sq(u) + h1_norm_sq(v)) * dist))


def phase_lipschitz_gap(z1, z2, reg: Optional[RegLevel] = None):
    """2|z1 - z2|^2 - |Im[(f(z1) - f(z2)) conj(z1 - z2)]|, nonnegative pointwise."""
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    diff = z1 - z2
    im = np.imag((pointwise_nonlinearity(z1, reg) - pointwise_nonlinearity(z2, reg)) * np.conj(diff))
    return _out(2.0 * np.abs(diff) ** 2 - np.abs(im))
