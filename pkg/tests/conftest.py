import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from gausson_lab.functionals import PhysParams, gausson
from gausson_lab.grid import Grid


@pytest.fixture(scope="session")
def grid():
    """Default box: L=12, h = 1/64."""
    return Grid(12.0, 1537)


@pytest.fixture(scope="session")
def coarse_grid():
    return Grid(12.0, 385)


@pytest.fixture(scope="session")
def params():
    return PhysParams(gamma=1.0, omega=1.0)


@pytest.fixture(scope="session")
def phi(grid, params):
    """Sampled peak-Gausson φ_{1,1}."""
    return gausson(params).sample(grid)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_bumps(grid, rng, count=4, spread=4.0):
    """Complex sum of Gaussian bumps, zero at the box ends."""
    centres = rng.uniform(-spread, spread, size=count)
    widths = rng.uniform(0.4, 1.5, size=count)
    coeffs = rng.standard_normal(count) + 1j * rng.standard_normal(count)

    def field(x):
        return sum(c * np.exp(-0.5 * ((x - x0) / w) ** 2) for c, x0, w in zip(coeffs, centres, widths))

    return grid.sample(field)
