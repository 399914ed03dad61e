"""Shared test machinery: named inertias, random states, finite-difference oracles.

The oracle differentiates observables along the exact nonlinear flow (integrated
by the independently tested rigid-body RK4) and never reuses the ladder
recursions it is checking.
"""

import numpy as np

from kooplift.attitude import build_attitude_ladder
from kooplift.position import build_position_ladder
from kooplift.rigidbody import BodyParams, RigidBodyState, rotation_from_euler

J0 = np.diag([0.0131, 0.020, 0.0234])
J1 = np.diag([0.001, 0.01, 0.1])
J2 = np.diag([0.1, 0.11, 0.012])
J3 = np.diag([0.1, 0.11, 0.12])
J4 = np.diag([1.0, 2.0, 3.0])
JQ = np.diag([0.0131, 0.0131, 0.0234])
JI = np.eye(3)

ALL_J = {"J0": J0, "J1": J1, "J2": J2, "J3": J3, "J4": J4, "JQ": JQ}


def params_for(J, m=1.2, g=9.81):
    return BodyParams(J=J, m=m, g=g)


def random_state(rng, nu_scale=1.0, nu_min=0.05):
    """Random physical state away from the gimbal singularity."""
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    mag = rng.uniform(nu_min, nu_scale)
    nu = mag * direction
    eta = rng.uniform(-0.3, 0.3, size=3)
    p = rng.uniform(-2.0, 2.0, size=3)
    v = rng.uniform(-1.0, 1.0, size=3)
    return RigidBodyState(p=p, v=v, R=rotation_from_euler(eta), nu=nu)


def flow_state(state0, params, F, M, t_target, n_sub=8):
    """Exact-flow state at t0 + t_target under constant (F, M), fine-step RK4.

    Uses the test module's own RK4 stepper (negative steps integrate backwards),
    independent of the library integrator it helps validate.
    """
    if t_target == 0.0:
        return state0
    Fv, Mv = np.asarray(F, float), np.asarray(M, float)
    h = t_target / n_sub
    s = state0
    for _ in range(n_sub):
        s = _rk4_state_step(s, params, Fv, Mv, h)
    return s


def _rk4_state_step(s, params, F, M, h):
    from kooplift.rigidbody import nonlinear_derivative, reorthonormalize

    def deriv(st):
        return nonlinear_derivative(st, F, M, params)

    def add(st, k, c):
        return RigidBodyState(p=st.p + c * k[0], v=st.v + c * k[1],
                              R=st.R + c * k[2], nu=st.nu + c * k[3])

    k1 = deriv(s)
    k2 = deriv(add(s, k1, 0.5 * h))
    k3 = deriv(add(s, k2, 0.5 * h))
    k4 = deriv(add(s, k3, h))
    new = RigidBodyState(
        p=s.p + (h / 6.0) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
        v=s.v + (h / 6.0) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
        R=s.R + (h / 6.0) * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]),
        nu=s.nu + (h / 6.0) * (k1[3] + 2 * k2[3] + 2 * k3[3] + k4[3]),
    )
    new.R = reorthonormalize(new.R)
    return new


def fd_step_for(params, state, M=(0.0, 0.0, 0.0)):
    """Central-difference step sized against the local dynamics rate.

    Small enough that the O(h^2) truncation stays well under 1e-6 relative even
    for the k = 8 ladder entries, large enough that subtractive cancellation
    stays below ~1e-10 relative.
    """
    gamma = params.J @ state.nu
    iota = 1.0 / np.min(np.diag(params.J))
    rate = iota * (np.linalg.norm(gamma) + np.linalg.norm(M)) + np.linalg.norm(state.nu)
    return min(1e-4, 1e-4 / max(rate, 1.0))


def ladder_series(state0, params, F, M, h, depth_att, N_z=None):
    """Attitude (and optionally position) ladders at t0-h, t0, t0+h along the flow."""
    out = []
    for t in (-h, 0.0, h):
        s = flow_state(state0, params, F, M, t)
        att = build_attitude_ladder(s.nu, params, depth_att)
        if N_z is None:
            out.append((att, None))
        else:
            pos = build_position_ladder(s, att, params, N_z)
            out.append((att, pos))
    return out


class FlowOracle:
    """Fourth-order central differences of ladder observables along the exact flow.

    Evaluates the ladders at t0 + {-2h, -h, +h, +2h} and differentiates with the
    five-point stencil, so the O(h^2) floor of the plain central difference is
    removed and the comparison tolerance is limited only by roundoff.
    """

    def __init__(self, state0, params, F, M, h, depth_att, N_z=None):
        self.h = h
        self.at = {}
        for t in (-2 * h, -h, 0.0, h, 2 * h):
            s = flow_state(state0, params, F, M, t, n_sub=8)
            att = build_attitude_ladder(s.nu, params, depth_att)
            pos = build_position_ladder(s, att, params, N_z) if N_z is not None else None
            self.at[t] = (att, pos)
        self.att0, self.pos0 = self.at[0.0]

    def diff(self, pick):
        """d/dt of pick(att, pos) at t0 (pick returns an ndarray)."""
        h = self.h
        f = {t: pick(*self.at[t]) for t in self.at}
        return (8.0 * (f[h] - f[-h]) - (f[2 * h] - f[-2 * h])) / (12.0 * h)


def rel_block_err(fd, model, floor=1e-14):
    """Relative error between 3-vectors/blocks with a zero-safe denominator."""
    num = np.linalg.norm(fd - model)
    den = max(np.linalg.norm(fd), np.linalg.norm(model))
    if den < floor:
        return 0.0
    return num / den
