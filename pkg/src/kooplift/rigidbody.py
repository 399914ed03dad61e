"""Exact nonlinear Newton-Euler rigid-body dynamics and fixed-step RK4 integration.

Ground truth for every lifted model in this package. State:

    p   position, inertial frame [m]
    v   linear velocity, body frame [m/s]
    R   rotation matrix, body -> inertial
    nu  angular velocity, body frame [rad/s]

Dynamics (diagonal inertia J, mass m, gravity g, body force F, body torque M):

    p_dot  = R v
    R_dot  = R S(nu)
    J nu_dot = M - S(nu) J nu
    v_dot  = F/m - S(nu) v - g R^T e3

Euler angles follow the Z-Y-X (yaw-pitch-roll) convention, R = Rz(psi) Ry(theta) Rx(phi).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GimbalProximity, NonFiniteState

E3 = np.array([0.0, 0.0, 1.0])
GRAVITY = 9.81
GIMBAL_COS_TOL = 1e-6
ORTHONORMALITY_TOL = 1e-9
# Magnitude past which an integration is declared divergent.
DIVERGENCE_LIMIT = 1e30


def skew(a) -> np.ndarray:
    """Skew-symmetric matrix S(a) with S(a) @ b == cross(a, b)."""
    a = np.asarray(a, dtype=float)
    return np.array([
        [0.0, -a[2], a[1]],
        [a[2], 0.0, -a[0]],
        [-a[1], a[0], 0.0],
    ])


def skew_stack(V: np.ndarray) -> np.ndarray:
    """Stack of skew matrices for rows of V, shape (n, 3) -> (n, 3, 3)."""
    V = np.asarray(V, dtype=float)
    out = np.zeros((V.shape[0], 3, 3))
    out[:, 0, 1] = -V[:, 2]
    out[:, 0, 2] = V[:, 1]
    out[:, 1, 0] = V[:, 2]
    out[:, 1, 2] = -V[:, 0]
    out[:, 2, 0] = -V[:, 1]
    out[:, 2, 1] = V[:, 0]
    return out


def rotation_from_euler(eta) -> np.ndarray:
    """Body->inertial rotation for Euler angles eta = (phi, theta, psi), Z-Y-X."""
    phi, theta, psi = np.asarray(eta, dtype=float)
    cf, sf = np.cos(phi), np.sin(phi)
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(psi), np.sin(psi)
    return np.array([
        [ct * cp, sf * st * cp - cf * sp, cf * st * cp + sf * sp],
        [ct * sp, sf * st * sp + cf * cp, cf * st * sp - sf * cp],
        [-st, sf * ct, cf * ct],
    ])


def euler_from_rotation(R) -> np.ndarray:
    """Inverse of rotation_from_euler; returns (phi, theta, psi) with |theta| <= pi/2."""
    R = np.asarray(R, dtype=float)
    theta = -np.arcsin(np.clip(R[2, 0], -1.0, 1.0))
    phi = np.arctan2(R[2, 1], R[2, 2])
    psi = np.arctan2(R[1, 0], R[0, 0])
    return np.array([phi, theta, psi])


def euler_rate_matrix(eta) -> np.ndarray:
    """Matrix W(eta) mapping Euler rates to body angular velocity, nu = W eta_dot.

    Raises GimbalProximity when cos(theta) falls below the tolerance that keeps
    rate extraction (the inverse map) well-conditioned.
    """
    phi, theta, _ = np.asarray(eta, dtype=float)
    ct = np.cos(theta)
    if abs(ct) < GIMBAL_COS_TOL:
        raise GimbalProximity(f"cos(theta)={ct:.3e} below tolerance {GIMBAL_COS_TOL:g}")
    cf, sf = np.cos(phi), np.sin(phi)
    return np.array([
        [1.0, 0.0, -np.sin(theta)],
        [0.0, cf, ct * sf],
        [0.0, -sf, ct * cf],
    ])


def euler_rates(eta, nu) -> np.ndarray:
    """Euler-angle rates eta_dot = W(eta)^{-1} nu."""
    return np.linalg.solve(euler_rate_matrix(eta), np.asarray(nu, dtype=float))


@dataclass
class BodyParams:
    """Rigid-body constants: diagonal inertia J [kg m^2], mass m [kg], gravity g [m/s^2]."""

    J: np.ndarray
    m: float
    g: float = GRAVITY
    J_inv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.J = np.atleast_1d(np.asarray(self.J, dtype=float))
        if self.J.ndim == 1:
            self.J = np.diag(self.J)
        offdiag = self.J - np.diag(np.diag(self.J))
        if np.any(np.abs(offdiag) > 0):
            raise ValueError("inertia tensor must be diagonal")
        if np.any(np.diag(self.J) <= 0):
            raise ValueError("inertia diagonal entries must be positive")
        if self.m <= 0:
            raise ValueError("mass must be positive")
        self.J_inv = np.diag(1.0 / np.diag(self.J))

    @property
    def J_diag(self) -> np.ndarray:
        return np.diag(self.J).copy()


@dataclass
class RigidBodyState:
    """Physical state (p, v, R, nu); R kept orthonormal to ~1e-9."""

    p: np.ndarray
    v: np.ndarray
    R: np.ndarray
    nu: np.ndarray

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float).reshape(3)
        self.v = np.asarray(self.v, dtype=float).reshape(3)
        self.R = np.asarray(self.R, dtype=float).reshape(3, 3)
        self.nu = np.asarray(self.nu, dtype=float).reshape(3)

    @classmethod
    def from_euler(cls, p, v, eta, nu) -> "RigidBodyState":
        return cls(p=p, v=v, R=rotation_from_euler(eta), nu=nu)

    @property
    def eta(self) -> np.ndarray:
        return euler_from_rotation(self.R)

    def orthonormality_error(self) -> float:
        return float(np.linalg.norm(self.R.T @ self.R - np.eye(3)))


def reorthonormalize(R: np.ndarray) -> np.ndarray:
    """Nearest rotation matrix (polar decomposition via SVD)."""
    U, _, Vt = np.linalg.svd(R)
    Q = U @ Vt
    if np.linalg.det(Q) < 0:
        U = U.copy()
        U[:, -1] *= -1.0
        Q = U @ Vt
    return Q


def nonlinear_derivative(s: RigidBodyState, F, M, params: BodyParams):
    """Exact state derivative (p_dot, v_dot, R_dot, nu_dot)."""
    F = np.asarray(F, dtype=float)
    M = np.asarray(M, dtype=float)
    Jnu = params.J @ s.nu
    nu_dot = params.J_inv @ (M - np.cross(s.nu, Jnu))
    v_dot = F / params.m - np.cross(s.nu, s.v) - params.g * (s.R.T @ E3)
    p_dot = s.R @ s.v
    R_dot = s.R @ skew(s.nu)
    return p_dot, v_dot, R_dot, nu_dot


def _pack(s: RigidBodyState) -> np.ndarray:
    return np.concatenate([s.p, s.v, s.R.reshape(9), s.nu])


def _unpack(y: np.ndarray) -> RigidBodyState:
    return RigidBodyState(p=y[0:3], v=y[3:6], R=y[6:15].reshape(3, 3), nu=y[15:18])


@dataclass
class RigidBodyTrajectory:
    """Sampled trajectory on the grid t[i] = t0 + i*dt."""

    t: np.ndarray
    p: np.ndarray
    v: np.ndarray
    R: np.ndarray
    nu: np.ndarray

    def __len__(self):
        return len(self.t)

    def state_at(self, i: int) -> RigidBodyState:
        return RigidBodyState(p=self.p[i], v=self.v[i], R=self.R[i], nu=self.nu[i])

    @property
    def eta(self) -> np.ndarray:
        out = np.empty((len(self.t), 3))
        for i in range(len(self.t)):
            out[i] = euler_from_rotation(self.R[i])
        return out


def integrate(state0: RigidBodyState, input_fn, params: BodyParams, dt: float,
              horizon: float, t0: float = 0.0) -> RigidBodyTrajectory:
    """Fixed-step RK4 integration of the exact dynamics.

    input_fn(t) must return the pair (F, M); it is sampled at every RK4 substage.
    The rotation block is re-orthonormalized after each full step. Raises
    NonFiniteState if the state overflows or turns NaN.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    n_steps = int(round(horizon / dt))
    if n_steps < 1:
        raise ValueError("horizon must cover at least one step")

    def f(t, y):
        s = _unpack(y)
        F, M = input_fn(t)
        p_dot, v_dot, R_dot, nu_dot = nonlinear_derivative(s, F, M, params)
        return np.concatenate([p_dot, v_dot, R_dot.reshape(9), nu_dot])

    t = t0 + dt * np.arange(n_steps + 1)
    Y = np.empty((n_steps + 1, 18))
    y = _pack(state0)
    Y[0] = y
    for i in range(n_steps):
        ti = t[i]
        k1 = f(ti, y)
        k2 = f(ti + 0.5 * dt, y + 0.5 * dt * k1)
        k3 = f(ti + 0.5 * dt, y + 0.5 * dt * k2)
        k4 = f(ti + dt, y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > DIVERGENCE_LIMIT:
            raise NonFiniteState(t[i + 1])
        y[6:15] = reorthonormalize(y[6:15].reshape(3, 3)).reshape(9)
        Y[i + 1] = y

    return RigidBodyTrajectory(
        t=t, p=Y[:, 0:3], v=Y[:, 3:6], R=Y[:, 6:15].reshape(-1, 3, 3), nu=Y[:, 15:18],
    )


def rk4_path(f, y0, dt: float, n_steps: int, t0: float = 0.0,
             divergence_limit: float = DIVERGENCE_LIMIT):
    """Generic fixed-step RK4 over a flat state vector.

    Returns (t, Y, diverged_at) where diverged_at is None for a clean run or the
    time of the first non-finite/overflowing sample; Y rows past that point hold NaN.
    """
    y = np.asarray(y0, dtype=float).copy()
    t = t0 + dt * np.arange(n_steps + 1)
    Y = np.full((n_steps + 1, y.size), np.nan)
    Y[0] = y
    diverged_at = None
    for i in range(n_steps):
        ti = t[i]
        k1 = f(ti, y)
        k2 = f(ti + 0.5 * dt, y + 0.5 * dt * k1)
        k3 = f(ti + 0.5 * dt, y + 0.5 * dt * k2)
        k4 = f(ti + dt, y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > divergence_limit:
            diverged_at = float(t[i + 1])
            break
        Y[i + 1] = y
    return t, Y, diverged_at
