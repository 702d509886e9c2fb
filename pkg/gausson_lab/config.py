"""Experiment configuration: flat key=value files read with python-dotenv, then CLI overrides."""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping, Optional, Tuple

import numpy as np
from dotenv import dotenv_values

from .dynamics import IntegratorConfig
from .errors import ConfigError
from .functionals import PhysParams
from .grid import Grid
from .groundstate import SolverSettings
from .orlicz import RegLevel
from .stability import PERTURBATIONS, PerturbationSpec

logger = logging.getLogger(__name__)

# ============================================================================
# DEFAULTS
# ============================================================================


@dataclass(frozen=True)
class ExperimentConfig:
    gamma: float = 1.0
    omega: float = 1.0
    L: float = 12.0
    n: int = 1537
    dt: float = 1e-3
    T: float = 20.0
    m_reg: float = 1e8
    tol: float = 1e-8
    seed: int = 1
    epsilon: float = 1e-3
    perturbation: str = "random_h1"
    output_dir: str = "runs"
    record_every: int = 100
    max_iter: int = 20000
    omegas: Tuple[float, ...] = (-1.0, 0.0, 1.0)
    gammas: Tuple[float, ...] = (0.5, 1.0, 2.0)

    def __post_init__(self):
        if not self.L > 0:
            raise ConfigError("L", f"must be positive, got {self.L}")
        if self.n < 3 or self.n % 2 == 0:
            raise ConfigError("n", f"must be odd and >= 3 so that x=0 is a node, got {self.n}")
        if not self.dt > 0:
            raise ConfigError("dt", f"must be positive, got {self.dt}")
        if not self.T >= 0:
            raise ConfigError("T", f"must be >= 0, got {self.T}")
        if not self.m_reg >= np.exp(3.0):
            raise ConfigError("m_reg", f"must be >= e^3, got {self.m_reg}")
        if not self.tol > 0:
            raise ConfigError("tol", f"must be positive, got {self.tol}")
        if not self.epsilon >= 0:
            raise ConfigError("epsilon", f"must be >= 0, got {self.epsilon}")
        if self.perturbation not in PERTURBATIONS:
            raise ConfigError("perturbation", f"must be one of {', '.join(PERTURBATIONS)}, got {self.perturbation!r}")
        if self.record_every < 1:
            raise ConfigError("record_every", f"must be >= 1, got {self.record_every}")
        if self.max_iter < 1:
            raise ConfigError("max_iter", f"must be >= 1, got {self.max_iter}")
        if not self.omegas:
            raise ConfigError("omegas", "needs at least one value")
        if not self.gammas:
            raise ConfigError("gammas", "needs at least one value")

    # builders for the module-level settings objects

    def grid(self) -> Grid:
        return Grid(self.L, self.n)

    def reg(self) -> RegLevel:
        return RegLevel(self.m_reg)

    def params(self) -> PhysParams:
        return PhysParams(gamma=self.gamma, omega=self.omega, reg=self.reg())

    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(dt=self.dt, T=self.T, record_every=self.record_every, reg=self.reg())

    def solver(self) -> SolverSettings:
        return SolverSettings(tol=self.tol, max_iter=self.max_iter)

    def perturbation_spec(self) -> PerturbationSpec:
        return PerturbationSpec(kind=self.perturbation, epsilon=self.epsilon, seed=self.seed)

    def to_text(self) -> str:
        """key=value lines, floats with 17 significant digits."""
        return "".join(f"{key}={value}\n" for key, value in self.items())

    def items(self):
        for f in fields(self):
            yield f.name, format_value(getattr(self, f.name))


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, tuple):
        return ",".join(format_value(v) for v in value)
    return str(value)


_FIELDS = {f.name: f for f in fields(ExperimentConfig)}
_ALIASES = {name.lower(): name for name in _FIELDS}


def _canonical(key: str) -> str:
    name = _ALIASES.get(key.strip().lower().replace("-", "_"))
    if name is None:
        raise ConfigError(key, "unknown configuration key")
    return name


def _coerce(name: str, raw: Any) -> Any:
    if raw is None:
        raise ConfigError(name, "missing value")
    kind = _FIELDS[name].type
    try:
        if kind in ("float", float):
            return float(raw)
        if kind in ("int", int):
            if isinstance(raw, float) and not raw.is_integer():
                raise ValueError(raw)
            return int(raw)
        if kind in ("str", str):
            return str(raw).strip()
        if isinstance(raw, (tuple, list)):
            return tuple(float(v) for v in raw)
        return tuple(float(v) for v in str(raw).split(",") if v.strip())
    except ValueError:
        raise ConfigError(name, f"malformed value {raw!r}") from None


def parse_config(text: str = "", overrides: Optional[Mapping[str, Any]] = None) -> ExperimentConfig:
    """Defaults < key=value text < overrides; None-valued overrides are ignored."""
    values = {}
    for key, raw in dotenv_values(stream=io.StringIO(text), interpolate=False).items():
        name = _canonical(key)
        values[name] = _coerce(name, raw)
    for key, raw in (overrides or {}).items():
        if raw is None:
            continue
        name = _canonical(key)
        values[name] = _coerce(name, raw)
    config = ExperimentConfig(**values)
    logger.debug("resolved config: %s", dict(config.items()))
    return config


def load_config(path: Optional[str], overrides: Optional[Mapping[str, Any]] = None) -> ExperimentConfig:
    text = Path(path).read_text(encoding="utf-8") if path else ""
    return parse_config(text, overrides)
