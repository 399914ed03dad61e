"""Tests for Eulerian bounds, validity horizons, and controllability checks."""

from itertools import permutations

import numpy as np
import pytest
from numpy.testing import assert_allclose

from kooplift.analysis import (
    attitude_bounds,
    controllability_at_state,
    controllability_check,
    eulerian,
    eulerian_row,
    observable_bound,
    spectral_norm,
    t_lim,
    t_lim_forced,
)
from kooplift.attitude import TruncationConfig, build_attitude_ladder
from kooplift.errors import InfiniteHorizon
from kooplift.position import build_position_ladder
from kooplift.rigidbody import BodyParams, RigidBodyState

from helpers import J0, params_for, random_state


def descents(perm):
    return sum(1 for i in range(len(perm) - 1) if perm[i] > perm[i + 1])


def brute_force_eulerian(n, k):
    return sum(1 for p in permutations(range(n)) if descents(p) == k)


class TestEulerian:
    def test_first_column(self):
        for n in range(1, 10):
            assert eulerian(n, 0) == 1

    def test_known_values(self):
        assert eulerian(3, 1) == 4
        assert eulerian(4, 1) == 11
        assert eulerian(4, 2) == 11

    def test_against_brute_force(self):
        for n in range(1, 8):
            for k in range(n):
                assert eulerian(n, k) == brute_force_eulerian(n, k)

    def test_row_sum_is_factorial(self):
        from math import factorial

        for n in range(1, 12):
            assert sum(eulerian_row(n)) == factorial(n)

    def test_out_of_range_is_zero(self):
        assert eulerian(3, 5) == 0

    def test_big_n_exact_integers(self):
        # Python ints: no overflow past n = 20
        from math import factorial

        assert sum(eulerian_row(25)) == factorial(25)


class TestBounds:
    def test_zero_gamma_bounds_vanish(self):
        params = params_for(J0)
        rep = attitude_bounds(params, 0.0, 0.0, 6)
        assert np.all(rep.bound_nu[1:] == 0)
        assert np.all(rep.bound_gamma[1:] == 0)
        assert rep.t_lim == np.inf

    def test_h0_bound_is_one(self):
        params = params_for(J0)
        rep = attitude_bounds(params, 0.01, 0.1, 4)
        # H_0 = I so the k = 0 bound must be >= 1 and equals the single Eulerian term
        assert rep.bound_H[0] == pytest.approx(1.0)

    def test_ladder_norms_never_exceed_bounds(self):
        rng = np.random.default_rng(21)
        K = 12
        for _ in range(200):
            J = np.diag(rng.uniform(0.005, 3.0, size=3))
            params = BodyParams(J=J, m=1.0)
            nu = rng.normal(size=3)
            nu *= rng.uniform(0.01, 2.0) / np.linalg.norm(nu)
            lad = build_attitude_ladder(nu, params, K + 2)
            gn = np.linalg.norm(params.J @ nu)
            rep = attitude_bounds(params, gn, np.linalg.norm(nu), K + 1)
            for k in range(K + 2):
                if k <= rep.K:
                    assert np.linalg.norm(lad.nu[k]) <= rep.bound_nu[k] * (1 + 1e-12)
                    assert np.linalg.norm(lad.gamma[k]) <= rep.bound_gamma[k] * (1 + 1e-12)
            for k in range(rep.K + 1):
                assert spectral_norm(lad.H[k]) <= rep.bound_H[k] * (1 + 1e-12)

    def test_relaxed_dominates_tight(self):
        rng = np.random.default_rng(22)
        for _ in range(100):
            J = np.diag(rng.uniform(0.005, 3.0, size=3))
            params = BodyParams(J=J, m=1.0)
            gn = rng.uniform(1e-4, 1.0)
            # relaxation uses ||nu|| <= ||J^{-1}|| ||gamma||
            vn = rng.uniform(0.0, 1.0) * spectral_norm(params.J_inv) * gn
            rep = attitude_bounds(params, gn, vn, 12)
            assert np.all(rep.relaxed_nu[1:] >= rep.bound_nu[1:] * (1 - 1e-12))
            assert np.all(rep.relaxed_H >= rep.bound_H * (1 - 1e-12))

    def test_position_family_bound(self):
        rng = np.random.default_rng(23)
        params = params_for(J0)
        for _ in range(50):
            s = random_state(rng)
            att = build_attitude_ladder(s.nu, params, 10)
            pos = build_position_ladder(s, att, params, 8)
            gn = np.linalg.norm(params.J @ s.nu)
            vn = np.linalg.norm(s.nu)
            for a, name in ((pos.g, "g"), (pos.v, "v"), (pos.p, "p")):
                b = observable_bound(np.linalg.norm(a[0]), params, gn, vn, 8)
                for k in range(9):
                    assert np.linalg.norm(a[k]) <= b[k] * (1 + 1e-12), (name, k)


class TestTLim:
    def test_formula_identity(self):
        params = BodyParams(J=np.diag([0.5, 1.0, 1.0]), m=1.0)  # ||J^{-1}|| = 2
        gamma0 = np.array([0.5, 0.0, 0.0])
        assert t_lim(params, gamma0) == pytest.approx(1.0)

    def test_j0_value(self):
        params = params_for(J0)
        nu0 = np.full(3, 0.001)
        expected = 1.0 / ((1.0 / 0.0131) * np.linalg.norm(J0 @ nu0))
        assert t_lim(params, J0 @ nu0) == pytest.approx(expected, rel=1e-12)

    def test_scaling(self):
        params = params_for(J0)
        nu0 = np.array([0.001, 0.002, -0.001])
        assert t_lim(params, J0 @ (10 * nu0)) == pytest.approx(t_lim(params, J0 @ nu0) / 10)

    def test_zero_gamma_raises(self):
        with pytest.raises(InfiniteHorizon):
            t_lim(params_for(J0), np.zeros(3))


class TestTLimForced:
    def test_large_k_limit(self):
        params = params_for(J0)
        base = 1.0 / (spectral_norm(params.J_inv) * 0.01)
        vals = [t_lim_forced(params, 0.01, 0.005, k) for k in (5, 20, 200)]
        assert abs(vals[-1] - base) / base < 0.05
        assert abs(vals[0] - base) > abs(vals[-1] - base)

    def test_sinusoid_integral_estimate(self):
        # M(t) = alpha [sin(2 pi t), sin(2 pi (t - pi/2)), sin(2 pi t)]: the
        # antiderivative amplitude is (alpha / 2 pi) per axis, sqrt(3) overall
        alpha = 1e-2
        M_int = alpha / (2 * np.pi) * np.sqrt(3.0)
        assert M_int == pytest.approx(2.7566444771338727e-03, rel=1e-9)

    def test_forced_below_unforced_for_strong_torque(self):
        # strong-torque scenario: t_lim uses gamma(t0) while t_lim_M uses the RMS
        # of the (much larger) forced response, so the forced horizon is shorter
        params = params_for(J0)
        nu0 = np.full(3, 0.01)
        gamma_t0 = np.linalg.norm(J0 @ nu0)
        gamma_rms = 2.4e-3  # forced response under alpha = 1e-2 dominates nu(t0)
        M_int = 1e-2 / (2 * np.pi) * np.sqrt(3.0)
        tlm = t_lim_forced(params, gamma_rms, M_int, 5)
        tl = 1.0 / (spectral_norm(params.J_inv) * gamma_t0)
        assert tlm < tl

    def test_domain_errors(self):
        params = params_for(J0)
        with pytest.raises(ValueError):
            t_lim_forced(params, 0.0, 1.0, 3)
        with pytest.raises(ValueError):
            t_lim_forced(params, 1.0, 0.0, 3)
        with pytest.raises(ValueError):
            t_lim_forced(params, 1.0, 1.0, 0)


class TestControllability:
    def test_rank_deficient_at_rest(self):
        params = params_for(J0)
        for N in (2, 4, 6):
            cfg = TruncationConfig(N_nu=N, N_z=N)
            s = RigidBodyState(p=[0.3, -0.2, 0.5], v=np.zeros(3), R=np.eye(3), nu=np.zeros(3))
            rep = controllability_at_state(s, params, cfg)
            assert not rep.full_rank

    def test_full_rank_generic(self):
        rng = np.random.default_rng(31)
        params = params_for(J0)
        for N in (2, 4, 6, 8, 12):
            cfg = TruncationConfig(N_nu=N, N_z=N)
            for _ in range(10):
                rep = controllability_at_state(random_state(rng), params, cfg)
                assert rep.full_rank, (N, rep.singular_values)

    def test_n3_structurally_deficient(self):
        # Xi_2 = (2/m) S^T(nu_0) is skew, so the stacked matrix determinant
        # det(Xi_2) det(J^{-1} H_2) vanishes identically at this truncation
        rng = np.random.default_rng(32)
        params = params_for(J0)
        cfg = TruncationConfig(N_nu=3, N_z=3)
        for _ in range(10):
            rep = controllability_at_state(random_state(rng), params, cfg)
            assert rep.rank == 5

    def test_spherical_inertia_loses_attitude_block(self):
        params = params_for(np.eye(3))
        cfg = TruncationConfig(N_nu=2, N_z=2)
        rng = np.random.default_rng(33)
        rep = controllability_at_state(random_state(rng), params, cfg)
        # H_1 = 0 for J = I: bottom block zero
        assert not rep.full_rank

    def test_report_records_tolerance_and_matrix(self):
        params = params_for(J0)
        rep = controllability_check(np.eye(3), np.zeros((3, 3)), np.eye(3), params)
        assert rep.tolerance > 0
        assert rep.matrix.shape == (6, 6)
        assert rep.full_rank
        assert rep.extras["equilibrated"] is True
