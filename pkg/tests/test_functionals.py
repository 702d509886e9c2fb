import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import erfc

from conftest import random_bumps
from gausson_lab.errors import DomainError
from gausson_lab.functionals import (
    PhysParams,
    action_S,
    energy,
    entropy_integral,
    gausson,
    gradient_S,
    nehari_I,
    nehari_rescale,
    pointwise_residual,
)
from gausson_lab.grid import Grid, inner_product, l2_norm, l2_norm_sq
from gausson_lab.orlicz import RegLevel


class TestGaussonReference:
    def test_constants_for_unit_parameters(self, params):
        ref = gausson(params)
        assert ref.center_value == pytest.approx(np.e * np.exp(-1 / 8), rel=1e-12)
        assert ref.center_value == pytest.approx(2.3989, abs=1e-4)
        assert ref.mass == pytest.approx(np.sqrt(np.pi) * np.e**2 * erfc(0.5), rel=1e-14)
        assert ref.mass == pytest.approx(6.2799, abs=1e-4)
        assert ref.d_value == pytest.approx(3.1400, abs=1e-4)
        assert ref.mass_by_quadrature() == pytest.approx(ref.mass, rel=1e-11)

    def test_classical_gausson(self):
        ref = gausson(PhysParams(gamma=0.0, omega=-1.0))
        assert ref.amplitude == 1.0
        assert ref.mass == pytest.approx(np.sqrt(np.pi), rel=1e-14)
        assert ref.d_value == pytest.approx(np.sqrt(np.pi) / 2, rel=1e-14)

    def test_jump_condition(self):
        ref = gausson(PhysParams(gamma=1.7, omega=0.3))
        left, right = ref.one_sided_derivatives()
        assert right - left == pytest.approx(-1.7 * ref.center_value, rel=1e-14)
        # one-sided derivatives of the closed form, by differences
        eps = 1e-7
        assert (ref.profile(eps) - ref.profile(0.0)) / eps == pytest.approx(right, rel=1e-5)
        assert (ref.profile(0.0) - ref.profile(-eps)) / eps == pytest.approx(left, rel=1e-5)

    @pytest.mark.parametrize("omega", [-2.0, -1.0, 0.0, 1.0, 2.0])
    @pytest.mark.parametrize("gamma", [0.1, 0.5, 1.0, 2.0, 3.0])
    def test_d_bounds(self, omega, gamma):
        ref = gausson(PhysParams(gamma=gamma, omega=omega))
        lower, upper = ref.d_bounds()
        assert lower < ref.d_value < upper

    def test_sampled_mass(self, phi, params):
        assert l2_norm_sq(phi) == pytest.approx(gausson(params).mass, rel=1e-4)


class TestFunctionals:
    def test_zero_function(self, coarse_grid, params):
        zero = coarse_grid.zeros()
        assert energy(zero, params) == 0.0
        assert action_S(zero, params) == 0.0

    def test_energy_of_gausson(self, phi, params):
        expected = -0.5 * params.omega * gausson(params).mass
        assert expected == pytest.approx(-3.1400, abs=1e-4)
        assert energy(phi, params) == pytest.approx(expected, rel=5e-3)

    def test_action_of_gausson(self, phi, params):
        assert action_S(phi, params) == pytest.approx(gausson(params).d_value, rel=5e-3)

    def test_identities(self, coarse_grid, rng):
        for _ in range(20):
            p = PhysParams(gamma=rng.uniform(-2, 3), omega=rng.uniform(-2, 2))
            u = random_bumps(coarse_grid, rng)
            mass = l2_norm_sq(u)
            E = energy(u, p)
            assert action_S(u, p) == pytest.approx(E + 0.5 * (p.omega + 1) * mass, rel=1e-12, abs=1e-12)
            assert nehari_I(u, p) == pytest.approx(2 * E + p.omega * mass, rel=1e-12, abs=1e-12)

    @given(theta=st.floats(min_value=0.0, max_value=2 * np.pi))
    @settings(max_examples=30, deadline=None)
    def test_phase_invariance(self, theta):
        grid = Grid(8.0, 257)
        p = PhysParams(gamma=1.0, omega=0.5)
        u = random_bumps(grid, np.random.default_rng(7))
        v = np.exp(1j * theta) * u
        for functional in (energy, action_S, nehari_I):
            assert functional(v, p) == pytest.approx(functional(u, p), rel=1e-12, abs=1e-12)

    def test_regularized_energy_matches_on_band(self, phi, params):
        # every nonzero sample sits inside [1/m, m], so the energies differ by ∫1/m² / 2
        core = phi.grid.sample(lambda x: np.where(np.abs(x) < 4, gausson(params).profile(x), 0.0))
        s = core.modulus[core.modulus > 0]
        reg = RegLevel(2.0 / s.min())
        reg_p = PhysParams(params.gamma, params.omega, reg)
        assert entropy_integral(core, reg) == pytest.approx(entropy_integral(core), abs=1e-6)
        assert energy(core, reg_p) == pytest.approx(energy(core, params), abs=1e-6)


class TestNehari:
    def test_gausson_is_nearly_on_manifold(self, params):
        values = []
        for n in (769, 1537):
            phi = gausson(params).sample(Grid(12.0, n))
            values.append(abs(nehari_I(phi, params)) / l2_norm_sq(phi))
        assert values[1] <= 1e-2
        assert values[0] / values[1] >= 1.8

    def test_centred_gaussian_value(self, phi, params):
        phi0 = gausson(PhysParams(gamma=0.0, omega=1.0)).sample(phi.grid)
        assert nehari_I(phi0, params) == pytest.approx(-params.gamma * np.e**2, rel=1e-3)

    def test_rescale_zeroes_I(self, coarse_grid, rng):
        for _ in range(30):
            p = PhysParams(gamma=rng.uniform(0, 3), omega=rng.uniform(-2, 2))
            u = 10.0 ** rng.uniform(-1, 1) * random_bumps(coarse_grid, rng)
            before = nehari_I(u, p)
            lam, scaled = nehari_rescale(u, p)
            assert lam > 0
            assert abs(nehari_I(scaled, p)) <= 1e-10 * max(abs(before), l2_norm_sq(scaled))

    def test_rescale_fixed_point(self, coarse_grid, rng):
        p = PhysParams(gamma=1.0, omega=1.0)
        _, on = nehari_rescale(random_bumps(coarse_grid, rng), p)
        lam, _ = nehari_rescale(on, p)
        assert lam == pytest.approx(1.0, abs=1e-12)

    def test_rescale_of_centred_gaussian(self, phi, params):
        phi0 = gausson(PhysParams(gamma=0.0, omega=1.0)).sample(phi.grid)
        lam, _ = nehari_rescale(phi0, params)
        expected = np.exp(-params.gamma * np.e**2 / (2 * l2_norm_sq(phi0)))
        assert lam < 1
        assert lam == pytest.approx(expected, rel=1e-3)

    def test_rescale_rejects_zero(self, coarse_grid, params):
        with pytest.raises(DomainError):
            nehari_rescale(coarse_grid.zeros(), params)


class TestGradient:
    @pytest.mark.slow
    def test_central_differences(self, coarse_grid, rng):
        eps = 1e-5
        for _ in range(50):
            p = PhysParams(gamma=rng.uniform(-2, 3), omega=rng.uniform(-2, 2))
            u = random_bumps(coarse_grid, rng)
            v = random_bumps(coarse_grid, rng)
            g = gradient_S(u, p)
            analytic = inner_product(g, v).real
            numeric = (action_S(u + eps * v, p) - action_S(u - eps * v, p)) / (2 * eps)
            scale = max(abs(numeric), l2_norm(g) * l2_norm(v))
            assert abs(analytic - numeric) <= 1e-6 * scale

    def test_regularized_gradient(self, coarse_grid, rng):
        p = PhysParams(gamma=1.0, omega=0.5, reg=RegLevel(1e3))
        u = random_bumps(coarse_grid, rng)
        v = random_bumps(coarse_grid, rng)
        eps = 1e-5
        analytic = inner_product(gradient_S(u, p), v).real
        numeric = (action_S(u + eps * v, p) - action_S(u - eps * v, p)) / (2 * eps)
        assert analytic == pytest.approx(numeric, rel=1e-6, abs=1e-6)

    def test_phase_equivariance(self, coarse_grid, rng):
        p = PhysParams(gamma=1.0, omega=1.0)
        u = random_bumps(coarse_grid, rng)
        rot = np.exp(0.7j)
        np.testing.assert_allclose(gradient_S(rot * u, p).values, rot * gradient_S(u, p).values, atol=1e-10)

    def test_vanishes_on_gausson_as_h_shrinks(self, params):
        norms = []
        for n in (769, 1537):
            phi = gausson(params).sample(Grid(12.0, n))
            norms.append(l2_norm(gradient_S(phi, params)))
        assert norms[1] < norms[0]


class TestResidual:
    def test_gausson_residuals(self, params):
        coarse = pointwise_residual(gausson(params).sample(Grid(12.0, 769)), params)
        fine = pointwise_residual(gausson(params).sample(Grid(12.0, 1537)), params)
        assert fine.interior <= 1e-3
        assert fine.jump <= 5e-2
        assert coarse.interior / fine.interior >= 3.5
        assert coarse.jump / fine.jump >= 1.8

    def test_classical_gausson(self, grid):
        p = PhysParams(gamma=0.0, omega=-1.0)
        u = grid.sample(lambda x: np.exp(-0.5 * x**2))
        res = pointwise_residual(u, p)
        assert res.interior <= 1e-3
        # smooth profile: the jump defect is h·|u''(0)| = h
        assert res.jump == pytest.approx(grid.h, rel=1e-2)

    def test_wrong_frequency_detected(self, phi, params):
        res = pointwise_residual(phi, PhysParams(params.gamma, params.omega + 0.1))
        core = phi.modulus[np.abs(phi.grid.x) < 1].min()
        assert res.interior >= 0.1 * core * (1 - 1e-2)
