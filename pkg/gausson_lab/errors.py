"""Exception types raised by gausson_lab."""


class GaussonLabError(Exception):
    """Base class for every error raised by this package."""


class GridError(GaussonLabError, ValueError):
    """Invalid grid parameters, or grid functions living on different grids."""


class RegularizationError(GaussonLabError, ValueError):
    """Regularization level below e^3."""


class ConfigError(GaussonLabError, ValueError):
    """Bad experiment configuration. `key` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


class ConvergenceError(GaussonLabError, RuntimeError):
    """An iterative solver did not reach its tolerance."""


class IntegrationAbort(GaussonLabError, RuntimeError):
    """The time integrator produced a non-finite state."""

    def __init__(self, step: int, message: str = "non-finite values in state"):
        super().__init__(f"step {step}: {message}")
        self.step = step


class DomainError(GaussonLabError, ValueError):
    """Input outside the domain of an operation (zero function, wrong sign of the coupling)."""
