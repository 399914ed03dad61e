"""Quadrotor case study: 16-state reduced lifted model, LQI, closed-loop sim.

With thrust-only force F = T e3 and an x/y-symmetric inertia (I_x ~ I_y, which
makes every nu_k(3) vanish for k > 0), the combined lifted model reduces to

    x = [z_0 .. z_4, nu_0(3)]  in R^16,   input zeta = [T, M] in R^4
    A  = blkdiag(position shift for N_z = 5, 0)
    B(x) rows: z_k -> [Xi_k e3, -Z_k],  last row -> [0, 0, 0, 1/I_z]

The tracking controller is designed on the LTI surrogate x' = A x + B* U* with
B* = I_16: an LQI over the augmented state X = [x - x_d, integral of x_d - x],
U* = -K X + U*_d. The physical input is recovered each control tick by least
squares, zeta = B(x)^+ U*, with the relative residual ||B zeta - U*|| / ||B zeta||
monitored as the feasibility signal. The plant in the closed-loop simulation is
the exact nonlinear rigid body at the fast rate; the controller runs at the
slow rate with zero-order hold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .attitude import block_shift_matrix, build_attitude_ladder
from .errors import (
    ConfigError,
    NoConvergence,
    NonFiniteState,
    NotStabilizable,
    RankDeficientB,
    SymmetryViolation,
)
from .harness import NAMED_INERTIAS
from .position import build_position_ladder, position_input_rows
from .rigidbody import (
    E3,
    BodyParams,
    RigidBodyState,
    euler_rate_matrix,
    nonlinear_derivative,
    reorthonormalize,
    rotation_from_euler,
)

N_Z_QUAD = 5
DIM_QUAD = 16
SYMMETRY_TOL = 1e-3


# ---------------------------------------------------------------------------
# Reduced model
# ---------------------------------------------------------------------------

def quad_lift(state: RigidBodyState, params: BodyParams) -> np.ndarray:
    """Exact 16-dimensional reduced lift [z_0..z_4, nu_0(3)]."""
    att = build_attitude_ladder(state.nu, params, N_Z_QUAD + 1)
    pos = build_position_ladder(state, att, params, N_Z_QUAD)
    return np.concatenate([pos.z[:N_Z_QUAD].ravel(), [state.nu[2]]])


@dataclass
class QuadModel:
    """Constant A plus the state-dependent 16 x 4 input-matrix evaluator."""

    A: np.ndarray
    params: BodyParams

    def b_matrix(self, state: RigidBodyState) -> np.ndarray:
        att = build_attitude_ladder(state.nu, self.params, N_Z_QUAD + 1)
        pos = build_position_ladder(state, att, self.params, N_Z_QUAD)
        rows6 = position_input_rows(pos, N_Z_QUAD)  # [Xi_k, -Z_k] for zeta = [F; M]
        B = np.zeros((DIM_QUAD, 4))
        B[: 3 * N_Z_QUAD, 0] = rows6[:, 0:3] @ E3
        B[: 3 * N_Z_QUAD, 1:4] = rows6[:, 3:6]
        B[15, 1:4] = self.params.J_inv[2, :]
        return B


def build_quad_model(params: BodyParams) -> QuadModel:
    """Reduced 16-state model; requires the x/y inertia symmetry that zeroes
    the higher yaw-rate observables."""
    Jd = params.J_diag
    if abs(Jd[0] - Jd[1]) / Jd[0] > SYMMETRY_TOL:
        raise SymmetryViolation(
            f"|I_x - I_y|/I_x = {abs(Jd[0] - Jd[1]) / Jd[0]:.2e} exceeds {SYMMETRY_TOL}")
    A = np.zeros((DIM_QUAD, DIM_QUAD))
    A[: 3 * N_Z_QUAD, : 3 * N_Z_QUAD] = block_shift_matrix(N_Z_QUAD)
    return QuadModel(A=A, params=params)


# ---------------------------------------------------------------------------
# Continuous algebraic Riccati solver (matrix sign function + Newton polish)
# ---------------------------------------------------------------------------

def _lyapunov_solve(A: np.ndarray, C: np.ndarray) -> np.ndarray:
    """Solve A^T X + X A = C by the Kronecker linear system (dense, small n)."""
    n = A.shape[0]
    I = np.eye(n)
    K = np.kron(A.T, I) + np.kron(I, A.T)
    return np.linalg.solve(K, C.ravel()).reshape(n, n)


def care_residual(A, B, Q, R, P) -> float:
    res = A.T @ P + P @ A - P @ B @ np.linalg.solve(R, B.T @ P) + Q
    return float(np.linalg.norm(res, 2))


def care_solve(A, B, Q, R, max_iter: int = 100, tol: float = 1e-12) -> np.ndarray:
    """Stabilizing solution of A^T P + P A - P B R^{-1} B^T P + Q = 0.

    Matrix-sign-function iteration on the Hamiltonian with determinant scaling
    (quadratically convergent), followed by one or two Newton-Kleinman steps to
    polish the residual. Raises NoConvergence if the iteration guard trips and
    NotStabilizable if no stabilizing solution emerges.
    """
    A = np.atleast_2d(np.asarray(A, float))
    B = np.atleast_2d(np.asarray(B, float))
    Q = np.atleast_2d(np.asarray(Q, float))
    R = np.atleast_2d(np.asarray(R, float))
    n = A.shape[0]
    G = B @ np.linalg.solve(R, B.T)
    H = np.block([[A, -G], [-Q, -A.T]])

    Z = H.copy()
    converged = False
    for _ in range(max_iter):
        sign_det, logdet = np.linalg.slogdet(Z)
        if sign_det == 0:
            raise NotStabilizable("Hamiltonian sign iteration hit a singular iterate")
        c = np.exp(logdet / (2 * n))
        Z_next = 0.5 * (Z / c + c * np.linalg.inv(Z))
        delta = np.linalg.norm(Z_next - Z, 1) / max(np.linalg.norm(Z_next, 1), 1e-300)
        Z = Z_next
        if delta < tol:
            converged = True
            break
    if not converged:
        raise NoConvergence(f"sign iteration did not settle in {max_iter} steps")

    S11 = Z[:n, :n]
    S12 = Z[:n, n:]
    S21 = Z[n:, :n]
    S22 = Z[n:, n:]
    lhs = np.vstack([S12, S22 + np.eye(n)])
    rhs = -np.vstack([S11 + np.eye(n), S21])
    P, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    P = 0.5 * (P + P.T)

    # Newton-Kleinman polish: quadratic convergence from the sign-function seed
    for _ in range(3):
        Acl = A - G @ P
        res = A.T @ P + P @ A - P @ G @ P + Q
        if np.linalg.norm(res, 2) <= 1e-14 * max(np.linalg.norm(P, 2), 1.0):
            break
        P = P + _lyapunov_solve(Acl, -res)
        P = 0.5 * (P + P.T)

    Acl = A - G @ P
    if np.max(np.linalg.eigvals(Acl).real) >= 0:
        raise NotStabilizable("closed loop not Hurwitz: (A, B) pair not stabilizable "
                              "or (Q, A) not detectable")
    return P


def lqr_gain(A, B, Q, R):
    """(K, P) for the continuous LQR; K = R^{-1} B^T P."""
    P = care_solve(A, B, Q, R)
    K = np.linalg.solve(np.atleast_2d(np.asarray(R, float)),
                        np.atleast_2d(np.asarray(B, float)).T @ P)
    return K, P


# ---------------------------------------------------------------------------
# Input recovery
# ---------------------------------------------------------------------------

def recover_input(B_x: np.ndarray, U_star: np.ndarray, rank_tol: Optional[float] = None):
    """Least-squares recovery zeta = B^+ U*; returns (zeta, residual_pct).

    residual_pct = ||B zeta - U*|| / ||B zeta|| (inf when the realized command
    vanishes while U* does not). Raises RankDeficientB if B loses column rank.
    """
    zeta, _, rank, sv = np.linalg.lstsq(B_x, U_star, rcond=rank_tol)
    if rank < B_x.shape[1]:
        raise RankDeficientB(f"input matrix rank {rank} < {B_x.shape[1]}")
    realized = B_x @ zeta
    den = np.linalg.norm(realized)
    num = np.linalg.norm(realized - U_star)
    if den == 0.0:
        return zeta, (0.0 if num == 0.0 else np.inf)
    return zeta, float(num / den)


# ---------------------------------------------------------------------------
# Reference trajectory
# ---------------------------------------------------------------------------

@dataclass
class PolySegment:
    """Ninth-order rest-to-rest polynomial per axis over one segment."""

    coeffs: np.ndarray  # (10, 3): coefficient j multiplies (t/T)^j
    duration: float

    @classmethod
    def rest_to_rest(cls, start, end, duration: float) -> "PolySegment":
        # boundary conditions: position at both ends, derivatives 1..4 zero
        def falling(j, d):
            c = 1.0
            for i in range(d):
                c *= (j - i)
            return c

        M = np.zeros((10, 10))
        for d in range(5):
            M[d, d] = falling(d, d)  # at tau = 0 only the tau^d term survives
            M[5 + d] = [falling(j, d) for j in range(10)]  # at tau = 1 all contribute
        rhs = np.zeros((10, 3))
        rhs[0] = np.asarray(start, float)
        rhs[5] = np.asarray(end, float)
        coeffs = np.linalg.solve(M, rhs)
        return cls(coeffs=coeffs, duration=float(duration))

    def eval(self, t: float, order: int = 0) -> np.ndarray:
        tau = np.clip(t / self.duration, 0.0, 1.0)
        out = np.zeros(3)
        for j in range(order, 10):
            c = 1.0
            for i in range(order):
                c *= (j - i)
            out += c * self.coeffs[j] * tau ** (j - order)
        return out / self.duration**order


@dataclass
class SquareReference:
    """Piecewise-polynomial closed square path; C^4 at every corner."""

    segments: list
    side: float
    total_T: float

    @property
    def corner_times(self) -> np.ndarray:
        return np.cumsum([s.duration for s in self.segments])

    def _locate(self, t: float):
        t = float(np.clip(t, 0.0, self.total_T))
        acc = 0.0
        for seg in self.segments:
            if t <= acc + seg.duration or seg is self.segments[-1]:
                return seg, t - acc
            acc += seg.duration
        return self.segments[-1], self.segments[-1].duration

    def deriv(self, t: float, order: int = 0) -> np.ndarray:
        seg, tau = self._locate(t)
        return seg.eval(tau, order)

    def pos(self, t: float) -> np.ndarray:
        return self.deriv(t, 0)


def square_trajectory(side: float, total_T: float) -> SquareReference:
    """Closed square in the x-y plane starting at the origin, four equal legs."""
    if total_T <= 0:
        raise ConfigError("total_T must be positive")
    corners = np.array([
        [0.0, 0.0, 0.0],
        [side, 0.0, 0.0],
        [side, side, 0.0],
        [0.0, side, 0.0],
        [0.0, 0.0, 0.0],
    ])
    leg_T = total_T / 4.0
    segments = [PolySegment.rest_to_rest(corners[i], corners[i + 1], leg_T)
                for i in range(4)]
    return SquareReference(segments=segments, side=side, total_T=total_T)


def flat_state(ref: SquareReference, t: float, params: BodyParams) -> RigidBodyState:
    """Virtual physical state from the flat outputs at hover linearization."""
    g = params.g
    p_d = ref.deriv(t, 0)
    v_in = ref.deriv(t, 1)
    a_d = ref.deriv(t, 2)
    j_d = ref.deriv(t, 3)
    eta = np.array([-a_d[1] / g, a_d[0] / g, 0.0])
    eta_dot = np.array([-j_d[1] / g, j_d[0] / g, 0.0])
    nu = euler_rate_matrix(eta) @ eta_dot
    R = rotation_from_euler(eta)
    return RigidBodyState(p=p_d, v=R.T @ v_in, R=R, nu=nu)


def lifted_reference(ref: SquareReference, params: BodyParams, model: QuadModel,
                     dt_ctrl: float, n_ticks: int, fd_h: float = 1e-4):
    """(x_d, u_d) arrays at controller ticks; u_d = x_d' - A x_d by central FD."""
    x_d = np.empty((n_ticks + 1, DIM_QUAD))
    u_d = np.empty((n_ticks + 1, DIM_QUAD))
    for i in range(n_ticks + 1):
        t = i * dt_ctrl
        x_d[i] = quad_lift(flat_state(ref, t, params), params)
        xp = quad_lift(flat_state(ref, t + fd_h, params), params)
        xm = quad_lift(flat_state(ref, max(t - fd_h, 0.0), params), params)
        span = (t + fd_h) - max(t - fd_h, 0.0)
        u_d[i] = (xp - xm) / span - model.A @ x_d[i]
    return x_d, u_d


# ---------------------------------------------------------------------------
# LQI controller
# ---------------------------------------------------------------------------

@dataclass
class LqiController:
    """Gain over the augmented state X = [x - x_d, integral of (x_d - x)]."""

    K: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    P: np.ndarray
    residual: float
    closed_loop_abscissa: float
    integrator_clamp: float = 98.1  # ~10x the hover-trim feedforward magnitude
    x_i: np.ndarray = field(default_factory=lambda: np.zeros(DIM_QUAD))
    _prev_xe: Optional[np.ndarray] = None
    windup_events: int = 0

    def reset(self):
        self.x_i = np.zeros(DIM_QUAD)
        self._prev_xe = None
        self.windup_events = 0


def design_lqi(model: QuadModel, Q: np.ndarray, R: np.ndarray) -> LqiController:
    """Solve the augmented-system Riccati problem for the surrogate B* = I."""
    A_aug = np.zeros((2 * DIM_QUAD, 2 * DIM_QUAD))
    A_aug[:DIM_QUAD, :DIM_QUAD] = model.A
    A_aug[DIM_QUAD:, :DIM_QUAD] = -np.eye(DIM_QUAD)
    B_aug = np.vstack([np.eye(DIM_QUAD), np.zeros((DIM_QUAD, DIM_QUAD))])
    K, P = lqr_gain(A_aug, B_aug, Q, R)
    res = care_residual(A_aug, B_aug, Q, R, P)
    abscissa = float(np.max(np.linalg.eigvals(A_aug - B_aug @ K).real))
    return LqiController(K=K, Q=Q, R=R, P=P, residual=res,
                         closed_loop_abscissa=abscissa)


def lqi_step(ctrl: LqiController, x: np.ndarray, x_d: np.ndarray, u_d: np.ndarray,
             dt_ctrl: float) -> np.ndarray:
    """Advance the error integrator and return the virtual command U*."""
    x_e = x_d - x
    if ctrl._prev_xe is None:
        ctrl.x_i = ctrl.x_i + dt_ctrl * x_e
    else:
        ctrl.x_i = ctrl.x_i + 0.5 * dt_ctrl * (x_e + ctrl._prev_xe)
    ctrl._prev_xe = x_e
    clip = ctrl.integrator_clamp
    if np.any(np.abs(ctrl.x_i) > clip):
        ctrl.windup_events += 1
        ctrl.x_i = np.clip(ctrl.x_i, -clip, clip)
    X = np.concatenate([-x_e, ctrl.x_i])
    return -ctrl.K @ X + u_d


# ---------------------------------------------------------------------------
# Closed-loop simulation
# ---------------------------------------------------------------------------

@dataclass
class QuadRunConfig:
    """Square-tracking run: geometry, rates, body, and controller weights.

    Weight vectors give one value per state block [z0, z1, z2, z3, z4, yaw-rate];
    each expands to its three (or one) states.
    """

    side: float = 2.0
    total_T: float = 70.0
    dt_plant: float = 1e-3
    dt_ctrl: float = 1e-2
    mass: float = 1.2
    gravity: float = 9.81
    inertia: object = "JQ"
    q_err: list = field(default_factory=lambda: [40.0, 20.0, 1.0, 0.02, 0.004, 10.0])
    q_int: list = field(default_factory=lambda: [10.0, 0.5, 0.01, 1e-4, 1e-4, 1.0])
    r: list = field(default_factory=lambda: [1.0, 1.0, 1.0, 1.0, 1.0, 1.0])
    integrator_clamp: float = 98.1

    def params(self) -> BodyParams:
        diag = NAMED_INERTIAS[self.inertia] if isinstance(self.inertia, str) else self.inertia
        return BodyParams(J=np.diag(np.asarray(diag, float)), m=self.mass, g=self.gravity)

    def _expand(self, per_block) -> np.ndarray:
        w = np.empty(DIM_QUAD)
        for b in range(5):
            w[3 * b : 3 * b + 3] = per_block[b]
        w[15] = per_block[5]
        return w

    def weights(self):
        Q = np.diag(np.concatenate([self._expand(self.q_err), self._expand(self.q_int)]))
        R = np.diag(self._expand(self.r))
        return Q, R

    def to_dict(self) -> dict:
        from dataclasses import asdict

        d = asdict(self)
        d["inertia"] = self.inertia if isinstance(self.inertia, str) else list(self.inertia)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "QuadRunConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown quad-run keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class QuadRunLog:
    """Controller-rate log of the closed-loop run."""

    t: np.ndarray
    p: np.ndarray
    p_d: np.ndarray
    v: np.ndarray
    eta: np.ndarray
    nu: np.ndarray
    zeta: np.ndarray          # [T, Mx, My, Mz]
    residual_pct: np.ndarray
    u_star_norm: np.ndarray
    windup_events: int
    corner_times: np.ndarray

    @property
    def tracking_error(self) -> np.ndarray:
        return np.linalg.norm(self.p - self.p_d, axis=1)

    def corner_errors(self) -> np.ndarray:
        """Tracking error at each corner arrival (steady points of the path)."""
        idx = np.searchsorted(self.t, self.corner_times) - 1
        idx = np.clip(idx, 0, len(self.t) - 1)
        return self.tracking_error[idx]


def closed_loop_sim(model: QuadModel, ctrl: LqiController, ref: SquareReference,
                    params: BodyParams, dt_plant: float = 1e-3,
                    dt_ctrl: float = 1e-2) -> QuadRunLog:
    """Two-rate loop: exact nonlinear plant at dt_plant, LQI + recovery at dt_ctrl."""
    steps_per_tick = int(round(dt_ctrl / dt_plant))
    if steps_per_tick < 1 or abs(steps_per_tick * dt_plant - dt_ctrl) > 1e-12:
        raise ConfigError("dt_ctrl must be an integer multiple of dt_plant")
    n_ticks = int(round(ref.total_T / dt_ctrl))
    x_d, u_d = lifted_reference(ref, params, model, dt_ctrl, n_ticks)

    state = RigidBodyState(p=np.zeros(3), v=np.zeros(3), R=np.eye(3), nu=np.zeros(3))
    ctrl.reset()

    t_log = np.empty(n_ticks + 1)
    p_log = np.empty((n_ticks + 1, 3))
    pd_log = np.empty((n_ticks + 1, 3))
    v_log = np.empty((n_ticks + 1, 3))
    eta_log = np.empty((n_ticks + 1, 3))
    nu_log = np.empty((n_ticks + 1, 3))
    zeta_log = np.empty((n_ticks + 1, 4))
    res_log = np.empty(n_ticks + 1)
    ustar_log = np.empty(n_ticks + 1)

    def plant_step(s: RigidBodyState, F, M, h) -> RigidBodyState:
        def deriv(st):
            return nonlinear_derivative(st, F, M, params)

        def nudge(st, k, c):
            return RigidBodyState(p=st.p + c * k[0], v=st.v + c * k[1],
                                  R=st.R + c * k[2], nu=st.nu + c * k[3])

        k1 = deriv(s)
        k2 = deriv(nudge(s, k1, 0.5 * h))
        k3 = deriv(nudge(s, k2, 0.5 * h))
        k4 = deriv(nudge(s, k3, h))
        out = RigidBodyState(
            p=s.p + (h / 6) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
            v=s.v + (h / 6) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
            R=s.R + (h / 6) * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]),
            nu=s.nu + (h / 6) * (k1[3] + 2 * k2[3] + 2 * k3[3] + k4[3]),
        )
        out.R = reorthonormalize(out.R)
        return out

    for i in range(n_ticks + 1):
        t = i * dt_ctrl
        x = quad_lift(state, params)
        B_x = model.b_matrix(state)
        U_star = lqi_step(ctrl, x, x_d[i], u_d[i], dt_ctrl)
        zeta, res_pct = recover_input(B_x, U_star)

        t_log[i] = t
        p_log[i] = state.p
        pd_log[i] = ref.pos(t)
        v_log[i] = state.v
        eta_log[i] = state.eta
        nu_log[i] = state.nu
        zeta_log[i] = zeta
        res_log[i] = res_pct
        ustar_log[i] = np.linalg.norm(U_star)

        if i == n_ticks:
            break
        F = zeta[0] * E3
        M = zeta[1:4]
        try:
            for _ in range(steps_per_tick):
                state = plant_step(state, F, M, dt_plant)
        except np.linalg.LinAlgError:
            raise NonFiniteState(t + dt_ctrl, "closed-loop plant diverged") from None
        if not (np.all(np.isfinite(state.p)) and np.all(np.isfinite(state.nu))):
            raise NonFiniteState(t + dt_ctrl, "closed-loop plant diverged")

    return QuadRunLog(t=t_log, p=p_log, p_d=pd_log, v=v_log, eta=eta_log, nu=nu_log,
                      zeta=zeta_log, residual_pct=res_log, u_star_norm=ustar_log,
                      windup_events=ctrl.windup_events, corner_times=ref.corner_times)


def run_quad_tracking(cfg: QuadRunConfig):
    """Full pipeline: model, controller, reference, closed loop. Returns (log, ctrl)."""
    params = cfg.params()
    model = build_quad_model(params)
    Q, R = cfg.weights()
    ctrl = design_lqi(model, Q, R)
    ctrl.integrator_clamp = cfg.integrator_clamp
    ref = square_trajectory(cfg.side, cfg.total_T)
    log = closed_loop_sim(model, ctrl, ref, params, cfg.dt_plant, cfg.dt_ctrl)
    return log, ctrl


def emit_quad_results(cfg: QuadRunConfig, log: QuadRunLog, ctrl: LqiController,
                      outdir) -> list:
    """Harness-schema CSV plus a JSON summary with gains and tracking stats."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    series = {
        "p_x": log.p[:, 0], "p_y": log.p[:, 1], "p_z": log.p[:, 2],
        "pd_x": log.p_d[:, 0], "pd_y": log.p_d[:, 1], "pd_z": log.p_d[:, 2],
        "v_x": log.v[:, 0], "v_y": log.v[:, 1], "v_z": log.v[:, 2],
        "eta_phi": log.eta[:, 0], "eta_theta": log.eta[:, 1], "eta_psi": log.eta[:, 2],
        "thrust": log.zeta[:, 0],
        "M_x": log.zeta[:, 1], "M_y": log.zeta[:, 2], "M_z": log.zeta[:, 3],
        "delta_bu_pct": log.residual_pct,
        "tracking_error": log.tracking_error,
    }
    lines = ["t,quantity,truncation,value"]
    for name, values in series.items():
        for ti, vi in zip(log.t.tolist(), np.asarray(values).tolist()):
            lines.append(f"{ti!r},{name},quad,{vi!r}")
    csv_path = outdir / "quad_square__run.csv"
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")

    err = log.tracking_error
    finite_res = log.residual_pct[np.isfinite(log.residual_pct)]
    summary = {
        "schema": "kooplift-quadrun/1",
        "config": cfg.to_dict(),
        "riccati_residual": ctrl.residual,
        "closed_loop_abscissa": ctrl.closed_loop_abscissa,
        "gain_matrix": ctrl.K.tolist(),
        "max_tracking_error": float(np.max(err)),
        "corner_errors": log.corner_errors().tolist(),
        "thrust_range": [float(np.min(log.zeta[:, 0])), float(np.max(log.zeta[:, 0]))],
        "max_torque_norm": float(np.max(np.linalg.norm(log.zeta[:, 1:4], axis=1))),
        "residual_pct_p95": float(np.percentile(finite_res, 95.0)),
        "residual_pct_max": float(np.max(finite_res)),
        "windup_events": log.windup_events,
        "csv": csv_path.name,
    }
    summary_path = outdir / "quad_square__summary.json"
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n",
                            encoding="utf-8")
    return [csv_path, summary_path]
