"""Combined lifted system: assembly, exact lifting, simulation, reconstruction.

The lifted state stacks the two observable chains,

    x = [nu_0 .. nu_{N_nu-1}, z_0 .. z_{N_z-1}],      dim 3 (N_nu + N_z)

and evolves as x_dot = A x + B(x) zeta with zeta = [F; M], A = blkdiag of the
two block shifts, and

    B rows (nu_k):  [0_3, J^{-1} H_k]
    B rows (z_k) :  [Xi_k, -Z_k]

The z-side coefficient matrices are not functions of x alone, so the simulator
carries the extended g/v/p ladders alongside x and propagates them with their
own exact forced identities; B is re-evaluated from the propagated ladders at
every step (`b_source="lifted"`, default) or from the exact lift of a paired
nonlinear trajectory (`b_source="nonlinear"`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .attitude import (
    AttitudeLadder,
    TruncationConfig,
    block_shift_matrix,
    build_attitude_ladder,
    extend_H,
    h_from_components,
    jordan_permutation,
)
from .errors import DegenerateGravityObservable
from .position import (
    PositionLadder,
    build_position_ladder,
    coefficient_matrices,
    compose_combined,
    position_input_rows,
)
from .rigidbody import (
    DIVERGENCE_LIMIT,
    GIMBAL_COS_TOL,
    BodyParams,
    RigidBodyState,
    RigidBodyTrajectory,
    rotation_from_euler,
)


@dataclass
class LiftedState:
    """Lifted coordinates plus the internal extended ladders used to evaluate B."""

    x: np.ndarray
    att: AttitudeLadder
    pos: PositionLadder
    config: TruncationConfig
    source_state: Optional[RigidBodyState] = None


def attitude_depth(config: TruncationConfig) -> int:
    """Ladder depth needed so the position coefficients can reach index N_z + 1."""
    return max(config.N_nu, config.N_z + 1)


def lift(state: RigidBodyState, params: BodyParams, config: TruncationConfig) -> LiftedState:
    """Exact lift of a physical state into observable coordinates."""
    att = build_attitude_ladder(state.nu, params, attitude_depth(config))
    pos = build_position_ladder(state, att, params, config.N_z)
    x = np.concatenate([att.nu[: config.N_nu].ravel(), pos.z[: config.N_z].ravel()])
    return LiftedState(x=x, att=att, pos=pos, config=config, source_state=state)


@dataclass
class LiftedSystem:
    """Constant block-shift A plus the state-dependent input-matrix evaluator."""

    A: np.ndarray
    params: BodyParams
    config: TruncationConfig

    def input_matrix(self, att: AttitudeLadder, pos: PositionLadder) -> np.ndarray:
        cfg = self.config
        B = np.zeros((cfg.dim, 6))
        JiH = self.params.J_inv @ att.H[: cfg.N_nu]
        B[: cfg.n_nu, 3:6] = JiH.reshape(cfg.n_nu, 3)
        B[cfg.n_nu :, :] = position_input_rows(pos, cfg.N_z)
        return B

    def vector_field(self, ls: LiftedState, F, M) -> np.ndarray:
        zeta = np.concatenate([np.asarray(F, float), np.asarray(M, float)])
        return self.A @ ls.x + self.input_matrix(ls.att, ls.pos) @ zeta


def assemble_lifted_system(params: BodyParams, config: TruncationConfig) -> LiftedSystem:
    A = np.zeros((config.dim, config.dim))
    A[: config.n_nu, : config.n_nu] = block_shift_matrix(config.N_nu)
    A[config.n_nu :, config.n_nu :] = block_shift_matrix(config.N_z)
    return LiftedSystem(A=A, params=params, config=config)


def reconstruct_from_observables(g0, z0, nu0, psi: float, params: BodyParams):
    """(nu, eta, p) from the base observables and an externally supplied yaw."""
    g0 = np.asarray(g0, float)
    gn = float(np.linalg.norm(g0))
    if abs(gn - params.g) > 0.01 * params.g:
        raise DegenerateGravityObservable(
            f"|g_0| = {gn:.6g} deviates from g = {params.g:g} by more than 1%")
    s_theta = np.clip(-g0[0] / params.g, -1.0, 1.0)
    c_theta = np.sqrt(1.0 - s_theta * s_theta)
    if c_theta < GIMBAL_COS_TOL:
        raise DegenerateGravityObservable("gravity observable at the gimbal alignment limit")
    theta = np.arcsin(s_theta)
    phi = np.arctan2(g0[1], g0[2])
    eta = np.array([phi, theta, float(psi)])
    p = rotation_from_euler(eta) @ np.asarray(z0, float)
    return np.asarray(nu0, float).copy(), eta, p


def reconstruct(ls: LiftedState, psi: float, params: BodyParams):
    """(nu, eta, p) from a lifted state; yaw is not observable and must be given."""
    cfg = ls.config
    nu0 = ls.x[0:3]
    z0 = ls.x[cfg.n_nu : cfg.n_nu + 3]
    return reconstruct_from_observables(ls.pos.g[0], z0, nu0, psi, params)


@dataclass
class LiftedTrajectory:
    """Lifted simulation output on t[i] = t0 + i*dt; aux blocks None in attitude mode."""

    t: np.ndarray
    x: np.ndarray
    config: TruncationConfig
    g: Optional[np.ndarray] = None
    v: Optional[np.ndarray] = None
    p: Optional[np.ndarray] = None
    diverged_at: Optional[float] = None

    @property
    def nu0(self) -> np.ndarray:
        return self.x[:, 0:3]

    @property
    def z0(self) -> np.ndarray:
        return self.x[:, self.config.n_nu : self.config.n_nu + 3]

    @property
    def n_valid(self) -> int:
        """Number of leading samples with finite state."""
        bad = np.nonzero(~np.all(np.isfinite(self.x), axis=1))[0]
        return int(bad[0]) if bad.size else len(self.t)


def _rk4_matrix(A: np.ndarray, dt: float) -> np.ndarray:
    """One-step RK4 operator for x_dot = A x (the degree-4 Taylor polynomial)."""
    n = A.shape[0]
    Phi = np.eye(n)
    term = np.eye(n)
    for j in range(1, 5):
        term = term @ (dt * A) / j
        Phi = Phi + term
    return Phi


def _propagate_linear(A, y0, dt, n_steps, t0):
    Phi = _rk4_matrix(A, dt)
    t = t0 + dt * np.arange(n_steps + 1)
    Y = np.full((n_steps + 1, y0.size), np.nan)
    y = y0.copy()
    Y[0] = y
    diverged_at = None
    for i in range(n_steps):
        y = Phi @ y
        if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > DIVERGENCE_LIMIT:
            diverged_at = float(t[i + 1])
            break
        Y[i + 1] = y
    return t, Y, diverged_at


def _rk4_forced(A, b_of, zeta_fn, y0, dt, n_steps, t0, per_substage: bool):
    """RK4 for y_dot = A y + B(y) zeta(t); B frozen per step unless per_substage."""
    t = t0 + dt * np.arange(n_steps + 1)
    Y = np.full((n_steps + 1, y0.size), np.nan)
    y = y0.copy()
    Y[0] = y
    diverged_at = None
    for i in range(n_steps):
        ti = t[i]
        if per_substage:
            def f(tau, u):
                return A @ u + b_of(u) @ zeta_fn(tau)
        else:
            B = b_of(y)

            def f(tau, u):
                return A @ u + B @ zeta_fn(tau)

        k1 = f(ti, y)
        k2 = f(ti + 0.5 * dt, y + 0.5 * dt * k1)
        k3 = f(ti + 0.5 * dt, y + 0.5 * dt * k2)
        k4 = f(ti + dt, y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > DIVERGENCE_LIMIT:
            diverged_at = float(t[i + 1])
            break
        Y[i + 1] = y
    return t, Y, diverged_at


# ---------------------------------------------------------------------------
# Attitude-only simulation
# ---------------------------------------------------------------------------

def simulate_attitude(x0: LiftedState, torque_fn, params: BodyParams, dt: float,
                      horizon: float, t0: float = 0.0, b_source: str = "lifted",
                      b_update: str = "step",
                      nonlinear_traj: Optional[RigidBodyTrajectory] = None,
                      jordan_form: bool = False) -> LiftedTrajectory:
    """Simulate the truncated attitude chain x_nu' = A_nu x_nu + B_nu(x) M(t).

    torque_fn(t) -> M, or None for the unforced system (pure one-step operator).
    """
    cfg = x0.config
    N = cfg.N_nu
    n_steps = int(round(horizon / dt))
    A = block_shift_matrix(N)
    perm = None
    if jordan_form:
        perm = jordan_permutation(N)
        A = A[np.ix_(perm, perm)]
    y0 = x0.x[: cfg.n_nu].copy()
    if perm is not None:
        y0 = y0[perm]

    if torque_fn is None:
        t, Y, div = _propagate_linear(A, y0, dt, n_steps, t0)
    else:
        if b_source == "nonlinear":
            if nonlinear_traj is None:
                raise ValueError("b_source='nonlinear' requires nonlinear_traj")
            traj_nu = nonlinear_traj.nu

            def b_rows_at(i):
                att = build_attitude_ladder(traj_nu[i], params, N)
                return (params.J_inv @ att.H).reshape(3 * N, 3)

            step = {"i": 0}

            def b_of(y):
                B = b_rows_at(step["i"])
                step["i"] += 1
                return B if perm is None else B[perm]

            t, Y, div = _rk4_forced(A, b_of, torque_fn, y0, dt, n_steps, t0,
                                    per_substage=False)
        else:
            inv = None if perm is None else np.argsort(perm)

            def b_of(y):
                xb = y if inv is None else y[inv]
                nus = xb.reshape(N, 3)
                gammas = nus @ params.J.T
                h = h_from_components(nus, gammas, params)
                H = extend_H(h, N)
                B = (params.J_inv @ H).reshape(3 * N, 3)
                return B if perm is None else B[perm]

            t, Y, div = _rk4_forced(A, b_of, torque_fn, y0, dt, n_steps, t0,
                                    per_substage=(b_update == "substage"))

    if perm is not None:
        inv = np.argsort(perm)
        Y = Y[:, inv]
    x_att = Y
    x_full = np.full((len(t), cfg.dim), np.nan)
    x_full[:, : cfg.n_nu] = x_att
    x_full[:, cfg.n_nu :] = 0.0
    bad = ~np.all(np.isfinite(x_att), axis=1)
    x_full[bad, cfg.n_nu :] = np.nan
    return LiftedTrajectory(t=t, x=x_full, config=cfg, diverged_at=div)


# ---------------------------------------------------------------------------
# Full (attitude + position) simulation
# ---------------------------------------------------------------------------

class _FullStack:
    """Layout and coefficient evaluation for the stacked full-model ODE.

    y = [x_nu, x_z, g, v, p] with each position family truncated at N_z.
    """

    def __init__(self, params: BodyParams, config: TruncationConfig):
        self.params = params
        self.cfg = config
        n_nu, n_z = config.n_nu, config.n_z
        self.sl_nu = slice(0, n_nu)
        self.sl_z = slice(n_nu, n_nu + n_z)
        self.sl_g = slice(n_nu + n_z, n_nu + 2 * n_z)
        self.sl_v = slice(n_nu + 2 * n_z, n_nu + 3 * n_z)
        self.sl_p = slice(n_nu + 3 * n_z, n_nu + 4 * n_z)
        self.dim = n_nu + 4 * n_z
        # depth the h/H recursion must reach for both B_nu and the coefficients
        self.depth_h = max(config.N_nu, config.N_z - 1, 1)

        A = np.zeros((self.dim, self.dim))
        A[self.sl_nu, self.sl_nu] = block_shift_matrix(config.N_nu)
        for s in (self.sl_z, self.sl_g, self.sl_v, self.sl_p):
            A[s, s] = block_shift_matrix(config.N_z)
        A[self.sl_v, self.sl_g] -= np.eye(n_z)
        A[self.sl_p, self.sl_v] += np.eye(n_z)
        self.A = A

    def pack(self, x0: LiftedState) -> np.ndarray:
        cfg = self.cfg
        y = np.empty(self.dim)
        y[self.sl_nu] = x0.x[: cfg.n_nu]
        y[self.sl_z] = x0.x[cfg.n_nu :]
        y[self.sl_g] = x0.pos.g[: cfg.N_z].ravel()
        y[self.sl_v] = x0.pos.v[: cfg.N_z].ravel()
        y[self.sl_p] = x0.pos.p[: cfg.N_z].ravel()
        return y

    def ladders_from_state(self, y: np.ndarray):
        """Rebuild coefficient matrices from the propagated observables."""
        cfg, params = self.cfg, self.params
        nus = np.zeros((self.depth_h, 3))
        nus[: cfg.N_nu] = y[self.sl_nu].reshape(cfg.N_nu, 3)[: self.depth_h]
        gammas = nus @ params.J.T
        h = h_from_components(nus, gammas, params)
        H = extend_H(h, self.depth_h)
        att = AttitudeLadder(nu=nus, gamma=gammas, h=h, H=H)
        g = y[self.sl_g].reshape(cfg.N_z, 3)
        v = y[self.sl_v].reshape(cfg.N_z, 3)
        p = y[self.sl_p].reshape(cfg.N_z, 3)
        return att, g, v, p

    def input_matrix_from(self, att: AttitudeLadder, g, v, p) -> np.ndarray:
        """Stacked (dim, 6) input matrix for zeta = [F; M]."""
        cfg, params = self.cfg, self.params
        N_z = cfg.N_z
        G, V, Omega, P = coefficient_matrices(att, g, v, p, params, N_z)
        _, Z, Xi, _, _ = compose_combined(g, v, p, G, V, Omega, P, params)
        B = np.zeros((self.dim, 6))
        JiH = params.J_inv @ att.H[: cfg.N_nu]
        B[self.sl_nu, 3:6] = JiH.reshape(cfg.n_nu, 3)
        B[self.sl_z, 0:3] = Xi.reshape(cfg.n_z, 3)
        B[self.sl_z, 3:6] = -Z.reshape(cfg.n_z, 3)
        B[self.sl_g, 3:6] = -G.reshape(cfg.n_z, 3)
        B[self.sl_v, 0:3] = Omega.reshape(cfg.n_z, 3) / params.m
        B[self.sl_v, 3:6] = -V.reshape(cfg.n_z, 3)
        B[self.sl_p, 3:6] = -P.reshape(cfg.n_z, 3)
        return B

    def input_matrix_lifted(self, y: np.ndarray) -> np.ndarray:
        att, g, v, p = self.ladders_from_state(y)
        return self.input_matrix_from(att, g, v, p)

    def input_matrix_nonlinear(self, state: RigidBodyState) -> np.ndarray:
        att = build_attitude_ladder(state.nu, self.params,
                                    max(self.depth_h, self.cfg.N_z + 1))
        pos = build_position_ladder(state, att, self.params, self.cfg.N_z)
        return self.input_matrix_from(att, pos.g[: self.cfg.N_z], pos.v[: self.cfg.N_z],
                                      pos.p[: self.cfg.N_z])


def simulate_lifted(x0: LiftedState, input_fn, params: BodyParams, dt: float,
                    horizon: float, t0: float = 0.0, b_source: str = "lifted",
                    b_update: str = "step",
                    nonlinear_traj: Optional[RigidBodyTrajectory] = None,
                    jordan_form: bool = False) -> LiftedTrajectory:
    """Simulate the combined lifted system x' = A x + B(x) [F; M].

    input_fn(t) -> (F, M), or None for the unforced system. The extended g/v/p
    ladders ride along as internal state so B stays well-defined along lifted
    trajectories; they are also reported for reconstruction.
    """
    stack = _FullStack(params, x0.config)
    cfg = x0.config
    n_steps = int(round(horizon / dt))
    y0 = stack.pack(x0)
    A = stack.A
    perm = None
    if jordan_form:
        perm_x = np.concatenate([jordan_permutation(cfg.N_nu),
                                 cfg.n_nu + jordan_permutation(cfg.N_z)])
        perm = np.concatenate([perm_x, np.arange(cfg.n_nu + cfg.n_z, stack.dim)])
        A = A[np.ix_(perm, perm)]
        y0 = y0[perm]
    inv = None if perm is None else np.argsort(perm)

    if input_fn is None:
        t, Y, div = _propagate_linear(A, y0, dt, n_steps, t0)
    else:
        def zeta_fn(tau):
            F, M = input_fn(tau)
            return np.concatenate([np.asarray(F, float), np.asarray(M, float)])

        if b_source == "nonlinear":
            if nonlinear_traj is None:
                raise ValueError("b_source='nonlinear' requires nonlinear_traj")
            step = {"i": 0}

            def b_of(y):
                B = stack.input_matrix_nonlinear(nonlinear_traj.state_at(step["i"]))
                step["i"] += 1
                return B if perm is None else B[perm]

            t, Y, div = _rk4_forced(A, b_of, zeta_fn, y0, dt, n_steps, t0,
                                    per_substage=False)
        else:
            def b_of(y):
                yb = y if inv is None else y[inv]
                B = stack.input_matrix_lifted(yb)
                return B if perm is None else B[perm]

            t, Y, div = _rk4_forced(A, b_of, zeta_fn, y0, dt, n_steps, t0,
                                    per_substage=(b_update == "substage"))

    if inv is not None:
        Y = Y[:, inv]
    x = np.column_stack([Y[:, stack.sl_nu], Y[:, stack.sl_z]])
    return LiftedTrajectory(
        t=t, x=x, config=cfg,
        g=Y[:, stack.sl_g], v=Y[:, stack.sl_v], p=Y[:, stack.sl_p],
        diverged_at=div,
    )
