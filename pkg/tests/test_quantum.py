import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optbell.quantum import (
    BELL_STATE,
    HADAMARD,
    I2,
    SIGMA_X,
    SIGMA_Z,
    SZ,
    BellSettings,
    bell_O_closed_form,
    bell_O_reduced,
    canonical_angle,
    check_density,
    chsh_full,
    expectation_pair,
    max_O,
    observable,
    observable_from_angle,
    pure_density,
    rho_of_q,
    theta_critical,
    theta_of_max,
    unitary_for_observable,
)

angles = st.floats(min_value=0.0, max_value=2 * math.pi, allow_nan=False)
qs = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


class TestObservables:
    """Bob's swept observable and the fixed sigma_x / sigma_z settings."""

    def test_theta_zero_is_sigma_z(self):
        np.testing.assert_allclose(observable_from_angle(0.0).matrix, SZ, atol=1e-15)

    def test_theta_half_pi_is_sigma_x(self):
        np.testing.assert_allclose(observable_from_angle(math.pi / 2).matrix, SIGMA_X.matrix, atol=1e-15)

    def test_three_quarter_pi_matrix(self):
        r = math.sqrt(2) / 2
        np.testing.assert_allclose(observable_from_angle(3 * math.pi / 4).matrix,
                                   [[-r, r], [r, r]], atol=1e-15)

    def test_non_unit_axis_rejected(self):
        from optbell.quantum import Observable
        with pytest.raises(ValueError):
            Observable(axis=(1.0, 1.0, 0.0))

    def test_observable_normalizes(self):
        obs = observable((3.0, 0.0, 4.0))
        assert obs.axis == pytest.approx((0.6, 0.0, 0.8))

    def test_zero_axis_rejected(self):
        with pytest.raises(ValueError):
            observable((0, 0, 0))

    @given(angles)
    def test_canonical_angle_range(self, t):
        c = canonical_angle(t)
        assert 0.0 <= c < 2 * math.pi


class TestStates:
    def test_rho_one_is_bell_projector(self):
        np.testing.assert_allclose(rho_of_q(1.0), np.outer(BELL_STATE, BELL_STATE.conj()), atol=1e-15)

    def test_rho_zero_is_diagonal(self):
        np.testing.assert_allclose(rho_of_q(0.0), np.diag([0.5, 0, 0, 0.5]), atol=0)

    def test_rho_half_corners(self):
        r = rho_of_q(0.5)
        assert r[0, 3] == pytest.approx(0.25) and r[3, 0] == pytest.approx(0.25)

    @pytest.mark.parametrize("q", [-0.1, 1.1])
    def test_q_out_of_range(self, q):
        with pytest.raises(ValueError):
            rho_of_q(q)

    def test_check_density_rejects_bad_input(self):
        with pytest.raises(ValueError, match="Hermitian"):
            check_density(np.triu(np.ones((4, 4))) / 4)
        with pytest.raises(ValueError, match="trace"):
            check_density(np.eye(4))
        with pytest.raises(ValueError, match="negative"):
            check_density(np.diag([1.5, -0.5, 0, 0]))


class TestExpectations:
    """Frozen values from direct traces."""

    @pytest.mark.parametrize("q", [0.0, 0.3, 1.0])
    def test_zz_is_one(self, q):
        assert expectation_pair(SIGMA_Z, SIGMA_Z, rho_of_q(q)) == pytest.approx(1.0, abs=1e-15)

    def test_xx(self):
        assert expectation_pair(SIGMA_X, SIGMA_X, rho_of_q(1.0)) == pytest.approx(1.0, abs=1e-15)
        assert expectation_pair(SIGMA_X, SIGMA_X, rho_of_q(0.0)) == pytest.approx(0.0, abs=1e-15)

    def test_reduced_examples(self):
        assert bell_O_reduced(0.0, 0.4) == pytest.approx(-1.0, abs=1e-15)
        assert bell_O_reduced(3 * math.pi / 4, 1.0) == pytest.approx(math.sqrt(2), abs=1e-12)
        assert bell_O_reduced(math.pi, 0.0) == pytest.approx(1.0, abs=1e-12)

    @settings(max_examples=60)
    @given(angles, qs)
    def test_reduced_matches_closed_form(self, theta, q):
        assert bell_O_reduced(theta, q) == pytest.approx(bell_O_closed_form(theta, q), abs=1e-12)

    @settings(max_examples=60)
    @given(angles, qs)
    def test_linear_in_q(self, theta, q):
        mix = q * bell_O_reduced(theta, 1.0) + (1 - q) * bell_O_reduced(theta, 0.0)
        assert bell_O_reduced(theta, q) == pytest.approx(mix, abs=1e-12)


class TestCHSH:
    def test_reduced_settings_shift_by_one(self):
        for theta, q in [(0.3, 0.2), (2.0, 1.0), (3 * math.pi / 4, 0.7)]:
            s = BellSettings.reduced_for(theta)
            assert chsh_full(s, rho_of_q(q)) == pytest.approx(bell_O_reduced(theta, q) + 1, abs=1e-12)

    def test_tsirelson_settings(self):
        r = 1 / math.sqrt(2)
        s = BellSettings(SIGMA_X, SIGMA_Z, observable((r, 0, -r)), observable((r, 0, r)))
        assert chsh_full(s, rho_of_q(1.0)) == pytest.approx(2 * math.sqrt(2), abs=1e-12)

    def test_maximally_mixed_gives_zero(self):
        rng = np.random.default_rng(3)
        obs = [observable(rng.normal(size=3)) for _ in range(4)]
        assert chsh_full(BellSettings(*obs), np.eye(4) / 4) == pytest.approx(0.0, abs=1e-15)

    def test_never_exceeds_tsirelson(self):
        rng = np.random.default_rng(11)
        worst = 0.0
        for _ in range(1000):
            s = BellSettings(*(observable(rng.normal(size=3)) for _ in range(4)))
            worst = max(worst, chsh_full(s, rho_of_q(rng.uniform())))
        assert worst <= 2 * math.sqrt(2) + 1e-9

    def test_reduced_requires_sigma_z(self):
        with pytest.raises(ValueError):
            BellSettings(SIGMA_X, SIGMA_X, SIGMA_Z, SIGMA_Z, reduced=True)


class TestClosedForms:
    @pytest.mark.parametrize("q, expected", [(1.0, math.pi / 2), (2 / 3, 1.965587), (1 / 3, 2.498092)])
    def test_theta_critical(self, q, expected):
        t = theta_critical(q)
        assert t == pytest.approx(expected, abs=1e-6)
        # residual of q = (1 + cos t) / sin t
        assert (1 + math.cos(t)) / math.sin(t) == pytest.approx(q, abs=1e-12)

    def test_theta_critical_undefined_at_zero(self):
        with pytest.raises(ValueError):
            theta_critical(0.0)

    def test_violation_region_dense_grid(self):
        thetas = np.linspace(0, 2 * math.pi, 10_000, endpoint=False)
        for q in (0.2, 0.5, 1.0):
            o = np.array([bell_O_closed_form(t, q) for t in thetas])
            inside = (thetas > theta_critical(q) + 1e-9) & (thetas < math.pi - 1e-9)
            outside = (thetas < theta_critical(q) - 1e-9) | (thetas > math.pi + 1e-9)
            assert np.all(o[inside] > 1) and np.all(o[outside] <= 1)

    @pytest.mark.parametrize("q", [0.1, 0.5, 2 / 3, 1.0])
    def test_maximum(self, q):
        thetas = np.linspace(0, 2 * math.pi, 200_001)
        grid_max = max(q * np.sin(thetas) - np.cos(thetas))
        assert max_O(q) == pytest.approx(grid_max, abs=1e-9)
        assert bell_O_reduced(theta_of_max(q), q) == pytest.approx(max_O(q), abs=1e-9)


class TestUnitaries:
    def test_sigma_x_is_hadamard(self):
        u, plate = unitary_for_observable(SIGMA_X)
        assert plate
        np.testing.assert_allclose(u, HADAMARD, atol=1e-15)

    def test_rotation_half_pi_is_hadamard(self):
        u, _ = unitary_for_observable(observable_from_angle(math.pi / 2))
        np.testing.assert_allclose(u, HADAMARD, atol=1e-15)

    def test_sigma_z_identity(self):
        u, plate = unitary_for_observable(SIGMA_Z)
        assert not plate
        np.testing.assert_allclose(u, I2)

    def test_general_axis_rejected(self):
        with pytest.raises(ValueError):
            unitary_for_observable(observable((0, 1, 0)))

    @given(angles)
    def test_diagonalizes(self, theta):
        obs = observable_from_angle(theta)
        u, _ = unitary_for_observable(obs)
        np.testing.assert_allclose(u @ obs.matrix @ u.conj().T, SZ, atol=1e-12)

    def test_pure_density_normalizes(self):
        rho = pure_density([2, 0, 0, 2])
        assert np.trace(rho).real == pytest.approx(1.0)
