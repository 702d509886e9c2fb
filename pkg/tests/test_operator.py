import numpy as np
import pytest

from conftest import random_bumps
from gausson_lab.dynamics import CrankNicolson
from gausson_lab.errors import DomainError
from gausson_lab.grid import Grid, h1_norm_sq, h1_seminorm_sq, inner_product, l2_norm, l2_norm_sq
from gausson_lab.operator import (
    _memory_weights,
    build_hamiltonian,
    form_lower_bound,
    form_norm_sq,
    ground_eigenpair,
    linear_propagator_oracle,
    quadratic_form,
)


class TestQuadraticForm:
    def test_bound_state_value(self):
        grid = Grid(24.0, 3073)
        gamma = 2.0
        u = grid.sample(lambda x: np.exp(-0.5 * gamma * np.abs(x)))
        # t_γ(u, u) = (-γ²/4)‖u‖² = -1 in the continuum
        assert quadratic_form(u, u, gamma) == pytest.approx(-1.0, abs=1e-3)

    def test_no_point_term_for_zero_coupling(self, coarse_grid, rng):
        u = random_bumps(coarse_grid, rng)
        assert quadratic_form(u, u, 0.0) == pytest.approx(h1_seminorm_sq(u), rel=1e-14)

    def test_symmetric(self, coarse_grid, rng):
        u = random_bumps(coarse_grid, rng)
        v = random_bumps(coarse_grid, rng)
        assert quadratic_form(u, v, 1.3) == pytest.approx(quadratic_form(v, u, 1.3), rel=1e-13, abs=1e-13)


class TestHamiltonian:
    def test_origin_diagonal(self, coarse_grid):
        H = build_hamiltonian(coarse_grid, 1.5)
        h = coarse_grid.h
        assert H.diag[coarse_grid.origin_index] == pytest.approx(2 / h**2 - 1.5 / h)
        assert H.diag[1] == pytest.approx(2 / h**2)
        assert np.all(H.offdiag == -1 / h**2)

    def test_laplacian_for_zero_coupling(self, coarse_grid):
        H = build_hamiltonian(coarse_grid, 0.0)
        assert np.all(H.diag == 2 / coarse_grid.h**2)

    def test_hermitian(self, coarse_grid):
        A = build_hamiltonian(coarse_grid, -0.7).interior
        assert abs(A - A.T).max() == 0

    def test_energy_matches_form(self, coarse_grid, rng):
        for gamma in (-2.0, 0.0, 1.0, 3.0):
            H = build_hamiltonian(coarse_grid, gamma)
            for _ in range(25):
                u = random_bumps(coarse_grid, rng)
                form = quadratic_form(u, u, gamma)
                assert H.energy(u) == pytest.approx(form, rel=1e-11, abs=1e-11)
                assert inner_product(H.apply(u), u).real == pytest.approx(form, rel=1e-11, abs=1e-11)

    def test_apply_leaves_boundary_zero(self, coarse_grid, rng):
        H = build_hamiltonian(coarse_grid, 1.0)
        out = H.apply(random_bumps(coarse_grid, rng))
        assert out.values[0] == 0 and out.values[-1] == 0


class TestFormNorm:
    def test_lower_bound(self):
        assert form_lower_bound(2.0) == 1.0
        assert form_lower_bound(-2.0) == 0.0

    def test_equivalent_to_h1(self, coarse_grid, rng):
        for gamma in (-1.0, 0.5, 2.0):
            for _ in range(20):
                u = random_bumps(coarse_grid, rng)
                value = form_norm_sq(u, gamma)
                assert value >= l2_norm_sq(u) * (1 - 1e-3)
                assert value <= (2.0 + form_lower_bound(gamma) + abs(gamma)) * h1_norm_sq(u)

    def test_energy_bounded_below(self, rng):
        grid = Grid(24.0, 1537)
        for gamma in (0.5, 2.0):
            H = build_hamiltonian(grid, gamma)
            for _ in range(20):
                u = random_bumps(grid, rng, spread=3.0)
                assert H.energy(u) >= -(form_lower_bound(gamma) + 1e-2) * l2_norm_sq(u)


class TestGroundEigenpair:
    def test_attractive_delta_bound_state(self):
        grid = Grid(24.0, 3073)
        lam, v = ground_eigenpair(build_hamiltonian(grid, 2.0))
        assert lam == pytest.approx(-1.0, abs=5e-2)
        assert l2_norm(v) == pytest.approx(1.0, rel=1e-12)
        np.testing.assert_allclose(v.values.real, np.exp(-np.abs(grid.x)), atol=1e-2)

    def test_eigenvalue_error_shrinks_with_h(self):
        coarse = Grid(24.0, 1537)
        errors = [abs(ground_eigenpair(build_hamiltonian(g, 2.0))[0] + 1.0) for g in (coarse, coarse.refine())]
        assert errors[0] / errors[1] >= 1.8

    def test_residual(self):
        grid = Grid(24.0, 1537)
        H = build_hamiltonian(grid, 2.0)
        lam, v = ground_eigenpair(H)
        residual = H.apply(v) - lam * v
        assert l2_norm(residual) <= 1e-9

    def test_zero_coupling_is_nonnegative(self, grid):
        lam, v = ground_eigenpair(build_hamiltonian(grid, 0.0))
        assert lam >= -1e-8
        assert lam == pytest.approx((np.pi / (2 * grid.L)) ** 2, rel=1e-3)
        assert np.all(v.values[1:-1].real > 0)

    def test_repulsive_delta_has_no_bound_state(self):
        lam, _ = ground_eigenpair(build_hamiltonian(Grid(24.0, 3073), -2.0))
        assert lam >= -1e-6


class TestPropagatorOracle:
    @staticmethod
    def packet(grid):
        return grid.sample(lambda x: np.exp(-0.5 * (x - 0.5) ** 2) * np.exp(0.8j * x))

    def test_rejects_attractive_coupling(self, grid):
        with pytest.raises(DomainError):
            linear_propagator_oracle(self.packet(grid), 0.1, 1.0)

    def test_memory_weights(self):
        np.testing.assert_allclose(_memory_weights(0.0), np.array([-1, 13, 13, -1]) / 24, rtol=1e-12)
        a = 0.3
        w = _memory_weights(a)
        assert w.sum() == pytest.approx(-np.expm1(-a) / a, rel=1e-12)

    @pytest.mark.parametrize("centre, k", [(0.5, 0.8), (0.0, 0.0)])
    def test_preserves_mass(self, grid, centre, k):
        u0 = grid.sample(lambda x: np.exp(-0.5 * (x - centre) ** 2) * np.exp(1j * k * x))
        out = linear_propagator_oracle(u0, 0.1, -1.0)
        assert abs(l2_norm(out) - l2_norm(u0)) <= 1e-6

    def test_weak_coupling_limit_is_free_flow(self, grid):
        u0 = self.packet(grid)
        free = linear_propagator_oracle(u0, 0.1, -1e-9)
        gaps = [l2_norm(linear_propagator_oracle(u0, 0.1, g) - free) for g in (-1e-2, -1e-3)]
        assert gaps[1] < gaps[0]
        assert gaps[1] < 1e-2 * l2_norm(u0)

    def test_matches_crank_nicolson(self, grid):
        gamma = -1.0
        u0 = self.packet(grid)
        step = CrankNicolson(build_hamiltonian(grid, gamma), 1e-3)
        u = u0
        for _ in range(100):
            u = step(u)
        oracle = linear_propagator_oracle(u0, 0.1, gamma)
        assert l2_norm(u - oracle) <= 1e-3 * l2_norm(u0)
