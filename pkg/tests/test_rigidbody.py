"""Tests for the exact rigid-body dynamics and RK4 integration."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from kooplift.errors import GimbalProximity, NonFiniteState
from kooplift.rigidbody import (
    BodyParams,
    RigidBodyState,
    euler_from_rotation,
    euler_rate_matrix,
    euler_rates,
    integrate,
    nonlinear_derivative,
    reorthonormalize,
    rk4_path,
    rotation_from_euler,
    skew,
)

from helpers import J0, params_for

E1, E2, E3 = np.eye(3)


class TestSkew:
    def test_cross_product_axioms(self):
        assert_allclose(skew(E1) @ E2, E3, atol=1e-15)
        a = np.array([0.3, -1.2, 2.0])
        assert_allclose(skew(a) @ a, np.zeros(3), atol=1e-15)

    def test_direct_arithmetic(self):
        # cross([1,2,3],[4,5,6]) computed by hand
        assert_allclose(skew([1.0, 2.0, 3.0]) @ [4.0, 5.0, 6.0], [-3.0, 6.0, -3.0])

    def test_antisymmetry(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            a = rng.normal(size=3)
            S = skew(a)
            assert_allclose(S + S.T, np.zeros((3, 3)), atol=1e-15)
            b = rng.normal(size=3)
            assert_allclose(S @ b, np.cross(a, b), atol=1e-14)


class TestRotation:
    def test_identity_at_zero(self):
        assert_allclose(rotation_from_euler([0, 0, 0]), np.eye(3), atol=1e-15)

    def test_quarter_yaw_maps_e1_to_e2(self):
        R = rotation_from_euler([0.0, 0.0, np.pi / 2])
        assert_allclose(R @ E1, E2, atol=1e-15)

    def test_orthonormal_random(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            eta = rng.uniform(-1.2, 1.2, size=3)
            R = rotation_from_euler(eta)
            assert_allclose(R.T @ R, np.eye(3), atol=1e-14)
            assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-12)

    def test_euler_round_trip(self):
        rng = np.random.default_rng(4)
        for _ in range(30):
            eta = rng.uniform(-1.2, 1.2, size=3)
            assert_allclose(euler_from_rotation(rotation_from_euler(eta)), eta, atol=1e-12)


class TestEulerRateMatrix:
    def test_identity_at_zero(self):
        assert_allclose(euler_rate_matrix([0, 0, 0]), np.eye(3), atol=1e-15)

    def test_roll_quarter(self):
        # W(phi, theta, psi) = [[1, 0, -s_theta], [0, c_phi, c_theta s_phi],
        #                       [0, -s_phi, c_theta c_phi]] at (pi/4, 0, 0)
        c = np.cos(np.pi / 4)
        W = euler_rate_matrix([np.pi / 4, 0.0, 0.0])
        assert_allclose(W, [[1, 0, 0], [0, c, c], [0, -c, c]], atol=1e-15)

    def test_zero_rates_give_zero_nu(self):
        eta = np.array([0.2, -0.3, 0.5])
        assert_allclose(euler_rate_matrix(eta) @ np.zeros(3), np.zeros(3))

    def test_gimbal_guard(self):
        with pytest.raises(GimbalProximity):
            euler_rate_matrix([0.0, np.pi / 2, 0.0])

    def test_rates_invert_w(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            eta = rng.uniform(-1.0, 1.0, size=3)
            nu = rng.normal(size=3)
            eta_dot = euler_rates(eta, nu)
            assert_allclose(euler_rate_matrix(eta) @ eta_dot, nu, atol=1e-12)

    def test_matches_kinematics_of_rotation(self):
        # Finite-difference check: R(eta + h*eta_dot) ~ R(eta) (I + h S(W eta_dot))
        rng = np.random.default_rng(6)
        h = 1e-6
        for _ in range(10):
            eta = rng.uniform(-0.8, 0.8, size=3)
            eta_dot = rng.normal(size=3)
            R0 = rotation_from_euler(eta)
            R1 = rotation_from_euler(eta + h * eta_dot)
            S_fd = R0.T @ (R1 - R0) / h
            nu = euler_rate_matrix(eta) @ eta_dot
            assert_allclose(S_fd, skew(nu), atol=1e-5)


class TestBodyParams:
    def test_rejects_bad_inertia(self):
        with pytest.raises(ValueError):
            BodyParams(J=np.array([[1.0, 0.1, 0], [0.1, 1, 0], [0, 0, 1]]), m=1.0)
        with pytest.raises(ValueError):
            BodyParams(J=np.diag([1.0, -1.0, 1.0]), m=1.0)
        with pytest.raises(ValueError):
            BodyParams(J=np.eye(3), m=0.0)

    def test_diagonal_vector_accepted(self):
        params = BodyParams(J=[0.1, 0.2, 0.3], m=2.0)
        assert_allclose(params.J, np.diag([0.1, 0.2, 0.3]))
        assert_allclose(params.J_inv @ params.J, np.eye(3), atol=1e-15)


class TestDerivative:
    def test_hover_equilibrium(self):
        params = params_for(J0, m=1.2)
        s = RigidBodyState(p=np.zeros(3), v=np.zeros(3), R=np.eye(3), nu=np.zeros(3))
        F = np.array([0.0, 0.0, params.m * params.g])
        p_dot, v_dot, R_dot, nu_dot = nonlinear_derivative(s, F, np.zeros(3), params)
        assert_allclose(p_dot, 0, atol=1e-15)
        assert_allclose(v_dot, 0, atol=1e-15)
        assert_allclose(R_dot, 0, atol=1e-15)
        assert_allclose(nu_dot, 0, atol=1e-15)

    def test_principal_axis_spin_is_torque_free(self):
        params = params_for(J0)
        s = RigidBodyState(p=np.zeros(3), v=np.zeros(3), R=np.eye(3),
                           nu=np.array([0.7, 0.0, 0.0]))
        _, _, _, nu_dot = nonlinear_derivative(s, np.zeros(3), np.zeros(3), params)
        assert_allclose(nu_dot, np.zeros(3), atol=0)

    def test_gyroscopic_term_frozen_value(self):
        # nu_dot = -J^{-1} (nu x J nu) at J0, nu = (0.1, 0.2, 0.3); direct arithmetic
        params = params_for(J0)
        s = RigidBodyState(p=np.zeros(3), v=np.zeros(3), R=np.eye(3),
                           nu=np.array([0.1, 0.2, 0.3]))
        _, _, _, nu_dot = nonlinear_derivative(s, np.zeros(3), np.zeros(3), params)
        expected = np.array([-0.000204 / 0.0131, 0.000309 / 0.020, -0.000138 / 0.0234])
        assert_allclose(nu_dot, expected, rtol=1e-12)


class TestIntegration:
    def test_zero_derivative_constant(self):
        t, Y, div = rk4_path(lambda t, y: np.zeros_like(y), np.array([1.0, -2.0]), 0.1, 50)
        assert div is None
        assert_allclose(Y[-1], [1.0, -2.0], atol=0)

    def test_linear_exactness(self):
        # p_dot = v with constant v: RK4 reproduces the line exactly
        v = np.array([0.3, -0.1, 0.05])
        params = params_for(np.eye(3), m=1.0)
        s0 = RigidBodyState(p=np.zeros(3), v=v, R=np.eye(3), nu=np.zeros(3))
        F = params.g * np.array([0, 0, 1.0])  # cancel gravity so v stays constant
        traj = integrate(s0, lambda t: (F * params.m, np.zeros(3)), params, 0.05, 2.0)
        assert_allclose(traj.p[-1], v * 2.0, rtol=1e-12)
        assert_allclose(traj.v[-1], v, rtol=1e-12)

    def test_momentum_and_energy_conservation(self):
        params = params_for(J0)
        s0 = RigidBodyState(p=np.zeros(3), v=np.zeros(3), R=np.eye(3),
                            nu=np.array([0.4, -0.3, 0.5]))
        zero_in = lambda t: (np.zeros(3), np.zeros(3))
        traj = integrate(s0, zero_in, params, 1e-3, 5.0)
        h0 = np.linalg.norm(params.J @ s0.nu)
        h_end = np.linalg.norm(params.J @ traj.nu[-1])
        assert abs(h_end - h0) / h0 < 1e-11
        e0 = 0.5 * s0.nu @ params.J @ s0.nu
        e_end = 0.5 * traj.nu[-1] @ params.J @ traj.nu[-1]
        assert abs(e_end - e0) / e0 < 1e-11

    def test_energy_drift_scales_as_dt4(self):
        # RK4 global error is O(dt^4): halving dt shrinks drift ~16x
        params = params_for(J0)
        s0 = RigidBodyState(p=np.zeros(3), v=np.zeros(3), R=np.eye(3),
                            nu=np.array([3.0, -2.0, 4.0]))
        zero_in = lambda t: (np.zeros(3), np.zeros(3))

        def drift(dt):
            traj = integrate(s0, zero_in, params, dt, 2.0)
            e0 = 0.5 * s0.nu @ params.J @ s0.nu
            e = 0.5 * np.einsum("ti,ij,tj->t", traj.nu, params.J, traj.nu)
            return np.max(np.abs(e - e0)) / e0

        d1, d2 = drift(0.02), drift(0.01)
        assert d1 / d2 == pytest.approx(16.0, rel=0.35)

    def test_orthonormality_preserved(self):
        params = params_for(J0)
        s0 = RigidBodyState(p=np.zeros(3), v=np.zeros(3), R=rotation_from_euler([0.2, -0.1, 0.4]),
                            nu=np.array([1.0, 2.0, -1.5]))
        traj = integrate(s0, lambda t: (np.zeros(3), np.zeros(3)), params, 1e-3, 2.0)
        for i in range(0, len(traj), 200):
            err = np.linalg.norm(traj.R[i].T @ traj.R[i] - np.eye(3))
            assert err < 1e-9

    def test_frame_consistency(self):
        # d/dt p matches R v along the flow
        params = params_for(J0)
        s0 = RigidBodyState(p=np.array([1.0, 0, 0]), v=np.array([0.1, 0.2, -0.05]),
                            R=rotation_from_euler([0.1, 0.2, 0.3]), nu=np.array([0.5, -0.2, 0.3]))
        dt = 1e-3
        traj = integrate(s0, lambda t: (np.zeros(3), np.zeros(3)), params, dt, 0.5)
        p_dot_fd = (traj.p[2:] - traj.p[:-2]) / (2 * dt)
        rv = np.einsum("tij,tj->ti", traj.R[1:-1], traj.v[1:-1])
        assert np.max(np.linalg.norm(p_dot_fd - rv, axis=1)) < 1e-6

    def test_divergence_detection(self):
        with pytest.raises(NonFiniteState):
            rk = rk4_path(lambda t, y: y * y, np.array([1.0]), 0.5, 100)
            if rk[2] is not None:
                raise NonFiniteState(rk[2])

    def test_integrate_raises_on_divergence(self):
        params = params_for(np.diag([1e-6, 2e-6, 3e-6]))
        s0 = RigidBodyState(p=np.zeros(3), v=np.zeros(3), R=np.eye(3),
                            nu=np.array([1.0, 1.0, 1.0]))
        huge = lambda t: (np.zeros(3), np.full(3, 1e12))
        with pytest.raises(NonFiniteState):
            integrate(s0, huge, params, 0.5, 50.0)


class TestReorthonormalize:
    def test_projects_back_to_rotation(self):
        rng = np.random.default_rng(11)
        R = rotation_from_euler([0.3, -0.2, 0.8])
        noisy = R + 1e-6 * rng.normal(size=(3, 3))
        Q = reorthonormalize(noisy)
        assert_allclose(Q.T @ Q, np.eye(3), atol=1e-14)
        assert np.linalg.det(Q) == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.norm(Q - R) < 1e-5
