"""Tests for the local damage law: energies, criterion and the implicit update."""

import numpy as np
import pytest

from micdam.errors import StateOutOfRange
from micdam.material import (
    damage_criterion,
    degradation_factor,
    elastic_energy_and_forces,
    elastic_tangents,
    flow_direction,
    inelastic_potential,
    interaction_tensor,
    isotropic_hardening_energy,
    isotropic_hardening_force,
    kinematic_hardening_energy,
    kinematic_hardening_force,
    local_update,
    material_tangent,
)
from micdam.material.energies import kinematic_hardening_force_with_derivative
from micdam.tensor import from_mandel, tensor_log_strain, to_mandel
from micdam.types import GaussPointState, MaterialParams


def random_sym(rng, scale=1.0):
    M = rng.normal(size=(3, 3)) * scale
    return 0.5 * (M + M.T)


def random_damage(rng, top=0.6):
    Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    return Q @ np.diag(rng.uniform(0.0, top, size=3)) @ Q.T


def gradient_fd(energy, A, h=1.0e-6):
    a = to_mandel(A)
    g = np.empty(6)
    for k in range(6):
        e = np.zeros(6)
        e[k] = h
        g[k] = (energy(from_mandel(a + e)) - energy(from_mandel(a - e))) / (2 * h)
    return g


def jacobian_fd(function, A, h=1.0e-6):
    a = to_mandel(A)
    J = np.empty((6, 6))
    for k in range(6):
        e = np.zeros(6)
        e[k] = h
        J[:, k] = (to_mandel(function(from_mandel(a + e))) - to_mandel(function(from_mandel(a - e)))) / (2 * h)
    return J


def assert_close(actual, expected, rel=1e-5, floor=1e-8):
    error = np.linalg.norm(np.asarray(actual) - np.asarray(expected))
    assert error <= rel * np.linalg.norm(expected) + floor


PARAMS = MaterialParams(theta=0.5, e_d=2.0)


class TestElasticEnergy:
    """Tests for the damaged elastic energy and its forces."""

    def test_alpha_is_energy_gradient(self):
        """alpha_e is the derivative of psi_e with respect to eta."""
        rng = np.random.default_rng(10)
        for _ in range(20):
            eta, D = random_sym(rng, 0.01), random_damage(rng)
            _, alpha, _ = elastic_energy_and_forces(eta, D, PARAMS)
            fd = gradient_fd(lambda X: elastic_energy_and_forces(X, D, PARAMS)[0], eta)
            assert_close(to_mandel(alpha), fd, rel=1e-6)

    def test_driving_force_is_negative_energy_gradient(self):
        """Y_e is minus the derivative of psi_e with respect to D."""
        rng = np.random.default_rng(11)
        for _ in range(20):
            eta, D = random_sym(rng, 0.01), random_damage(rng)
            _, _, Y = elastic_energy_and_forces(eta, D, PARAMS)
            fd = gradient_fd(lambda X: elastic_energy_and_forces(eta, X, PARAMS)[0], D)
            assert_close(to_mandel(Y), -fd, rel=1e-6)

    def test_tangents_match_finite_differences(self):
        """All four second derivatives agree with central differences."""
        rng = np.random.default_rng(12)
        for _ in range(10):
            eta, D = random_sym(rng, 0.01), random_damage(rng)
            t = elastic_tangents(eta, D, PARAMS)
            alpha = lambda X, Dm=D: elastic_energy_and_forces(X, Dm, PARAMS)[1]  # noqa: E731
            Y_of_eta = lambda X, Dm=D: elastic_energy_and_forces(X, Dm, PARAMS)[2]  # noqa: E731
            alpha_of_D = lambda X, e=eta: elastic_energy_and_forces(e, X, PARAMS)[1]  # noqa: E731
            Y_of_D = lambda X, e=eta: elastic_energy_and_forces(e, X, PARAMS)[2]  # noqa: E731
            assert_close(t.dalpha_deta, jacobian_fd(alpha, eta))
            assert_close(t.dY_deta, jacobian_fd(Y_of_eta, eta))
            assert_close(t.dalpha_dD, jacobian_fd(alpha_of_D, D))
            assert_close(t.dY_dD, jacobian_fd(Y_of_D, D), floor=1e-6)

    def test_undamaged_anisotropic_law_is_hencky(self):
        """With D = 0 and theta = 1 the stress is 2 mu dev(eta) + K tr(eta) I."""
        p = MaterialParams()
        eta = np.diag([0.01, -0.002, 0.003])
        _, alpha, _ = elastic_energy_and_forces(eta, np.zeros((3, 3)), p)
        dev = eta - np.trace(eta) / 3.0 * np.eye(3)
        expected = 2.0 * p.mu * dev + p.bulk_modulus * np.trace(eta) * np.eye(3)
        np.testing.assert_allclose(alpha, expected, rtol=1e-12, atol=1e-9)

    def test_degradation_rejects_full_volumetric_damage(self):
        """tr D >= 3 is outside the admissible range."""
        with pytest.raises(StateOutOfRange):
            degradation_factor(np.eye(3), 1.0)

    def test_degradation_factor(self):
        """f_d = (1 - tr D / 3)^e_d."""
        assert degradation_factor(0.3 * np.eye(3), 2.0) == pytest.approx(0.49)


class TestHardening:
    """Tests for isotropic and kinematic hardening."""

    def test_isotropic_force_is_negative_derivative(self):
        """R_d = -dpsi_d/dxi_d."""
        p = MaterialParams()
        for xi in (0.0, 0.01, 0.2):
            h = 1e-8
            fd = (isotropic_hardening_energy(xi + h, p) - isotropic_hardening_energy(xi - h, p)) / (2 * h)
            assert isotropic_hardening_force(xi, p) == pytest.approx(-fd, rel=1e-6, abs=1e-7)

    def test_kinematic_force_is_energy_gradient(self):
        """Y_h is the derivative of psi_h with respect to D."""
        rng = np.random.default_rng(13)
        p = MaterialParams()
        for _ in range(20):
            D = random_damage(rng, 0.8)
            fd = gradient_fd(lambda X: kinematic_hardening_energy(X, p), D)
            assert_close(to_mandel(kinematic_hardening_force(D, p)), fd, rel=1e-6)

    def test_kinematic_derivative(self):
        """dY_h/dD agrees with central differences."""
        rng = np.random.default_rng(14)
        p = MaterialParams()
        for _ in range(10):
            D = random_damage(rng, 0.8)
            _, dY = kinematic_hardening_force_with_derivative(D, p)
            assert_close(dY, jacobian_fd(lambda X: kinematic_hardening_force(X, p), D))

    def test_kinematic_barrier_is_continued_beyond_threshold(self):
        """Eigenvalues past a_h use the Taylor branch and stay finite."""
        p = MaterialParams(a_h=0.9)
        D = np.diag([0.95, 0.1, 0.0])
        Y = kinematic_hardening_force(D, p)
        assert np.all(np.isfinite(Y))
        assert Y[0, 0] > kinematic_hardening_force(np.diag([0.9, 0.1, 0.0]), p)[0, 0]

    def test_kinematic_rejects_unit_eigenvalue(self):
        """An eigenvalue of one raises StateOutOfRange."""
        with pytest.raises(StateOutOfRange):
            kinematic_hardening_force(np.diag([1.0, 0.0, 0.0]), MaterialParams())


class TestCriterion:
    """Tests for the damage onset criterion."""

    def test_zero_driving_force(self):
        """Phi_d = -(Y0 - R_d) without driving force."""
        p = MaterialParams()
        assert damage_criterion(np.zeros((3, 3)), 0.0, np.zeros((3, 3)), p) == pytest.approx(-p.Y0)
        assert damage_criterion(np.zeros((3, 3)), -1.0, np.zeros((3, 3)), p) == pytest.approx(-p.Y0 - 1.0)

    def test_compressive_driving_force_does_not_damage(self):
        """Negative-definite Y has no positive part."""
        p = MaterialParams()
        assert damage_criterion(-np.diag([5.0, 3.0, 1.0]), 0.0, np.zeros((3, 3)), p) == pytest.approx(-p.Y0)

    def test_uniaxial_onset(self):
        """Y = y e1 e1 on virgin material reaches onset at y = Y0 / sqrt(3)."""
        p = MaterialParams()
        Y = np.diag([p.Y0 / np.sqrt(3.0), 0.0, 0.0])
        assert damage_criterion(Y, 0.0, np.zeros((3, 3)), p) == pytest.approx(0.0, abs=1e-12)

    def test_interaction_tensor_sandwich(self):
        """A : Y = (I - D) Y (I - D) for c_d = 1."""
        rng = np.random.default_rng(15)
        D, Y = random_damage(rng), random_sym(rng)
        W = np.eye(3) - D
        np.testing.assert_allclose(interaction_tensor(D, 1.0) @ to_mandel(Y), to_mandel(W @ Y @ W), atol=1e-12)

    def test_flow_direction_is_potential_gradient(self):
        """N = dg_d1/dY."""
        rng = np.random.default_rng(16)
        p = MaterialParams()
        for _ in range(20):
            Y, D = random_sym(rng, 3.0), random_damage(rng)
            if np.min(np.abs(np.linalg.eigvalsh(Y))) < 1e-2:
                continue
            fd = gradient_fd(lambda X: inelastic_potential(X, -0.5, D, p), Y)
            assert_close(to_mandel(flow_direction(Y, -0.5, D, p)), fd, rel=1e-6)


ETA_INELASTIC = np.array([[-0.004, 0.002, 0.0], [0.002, 0.01, 0.001], [0.0, 0.001, -0.004]])


class TestLocalUpdate:
    """Tests for the implicit local update."""

    def test_elastic_step(self):
        """Below onset nothing evolves and the tangent is elastic."""
        p = MaterialParams()
        eta = np.diag([0.0005, -0.0002, 0.0])
        result = local_update(eta, np.zeros(p.n_dbar), GaussPointState(), 1.0, p)
        assert result.delta_gamma == 0.0
        assert not result.inelastic
        np.testing.assert_array_equal(result.state_new.D, np.zeros((3, 3)))
        np.testing.assert_allclose(result.C_alpha_eta, elastic_tangents(eta, np.zeros((3, 3)), p).dalpha_deta)

    def test_inelastic_step_is_consistent(self):
        """Damage grows with non-negative dissipation and satisfies the viscous consistency."""
        p = MaterialParams()
        dt = 1.0
        result = local_update(ETA_INELASTIC, np.zeros(p.n_dbar), GaussPointState(), dt, p)
        assert result.inelastic
        values = np.linalg.eigvalsh(result.state_new.D)
        assert values.min() >= -1e-8
        assert values.max() < 1.0
        assert result.state_new.dissipation_increment >= 0.0
        assert result.state_new.xi_d == pytest.approx(result.delta_gamma)
        assert result.criterion - p.eta_v * result.delta_gamma / dt == pytest.approx(0.0, abs=1e-6)

    @pytest.mark.parametrize("variant", ["A", "B", "C", "local"])
    def test_analytic_tangent_matches_finite_differences(self, variant):
        """Consistent tangents agree with differencing the whole update."""
        p = MaterialParams().with_variant(variant)
        rng = np.random.default_rng(17)
        dbar = rng.uniform(0.0, 1e-4, size=p.n_dbar)
        old = GaussPointState()
        analytic = local_update(ETA_INELASTIC, dbar, old, 1.0, p)
        numeric = local_update(ETA_INELASTIC, dbar, old, 1.0, p, tangent="fd")
        assert analytic.inelastic
        assert_close(analytic.C_alpha_eta, numeric.C_alpha_eta, rel=1e-4)
        assert_close(analytic.dalpha_ddbar, numeric.dalpha_ddbar, rel=1e-4, floor=1e-6)
        assert_close(analytic.dd_deta, numeric.dd_deta, rel=1e-3, floor=1e-6)
        assert_close(analytic.dd_ddbar, numeric.dd_ddbar, rel=1e-3, floor=1e-6)

    def test_viscosity_slows_damage(self):
        """A larger eta_v gives a smaller multiplier increment."""
        slow = local_update(ETA_INELASTIC, np.zeros(3), GaussPointState(), 1.0, MaterialParams(eta_v=10.0))
        fast = local_update(ETA_INELASTIC, np.zeros(3), GaussPointState(), 1.0, MaterialParams(eta_v=1.0))
        assert 0.0 < slow.delta_gamma < fast.delta_gamma


class TestMaterialTangent:
    """Tests for the pull-back to the reference configuration."""

    def test_stress_tangent_matches_finite_differences(self):
        """dS/dE agrees with differencing S(C) for a Hencky law."""
        p = MaterialParams()
        rng = np.random.default_rng(18)
        F = np.eye(3) + 0.01 * rng.normal(size=(3, 3))
        C = F.T @ F
        zero = np.zeros((3, 3))

        def stress(Cm):
            eta, P = tensor_log_strain(Cm)
            alpha = elastic_energy_and_forces(eta, zero, p)[1]
            return from_mandel(P @ to_mandel(alpha))

        eta, _ = tensor_log_strain(C)
        alpha = elastic_energy_and_forces(eta, zero, p)[1]
        C_alpha = elastic_tangents(eta, zero, p).dalpha_deta
        S, dS_dE, _ = material_tangent(alpha, C_alpha, C)
        np.testing.assert_allclose(S, stress(C), atol=1e-9)

        c = to_mandel(C)
        h = 1e-6
        fd = np.empty((6, 6))
        for k in range(6):
            e = np.zeros(6)
            e[k] = 2 * h
            fd[:, k] = (to_mandel(stress(from_mandel(c + e))) - to_mandel(stress(from_mandel(c - e)))) / (2 * h)
        assert_close(dS_dE, fd, rel=1e-5)
