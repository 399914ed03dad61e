"""Position-side observable ladders and the lifted position system.

Base observables (R body->inertial, p inertial position, v body velocity):

    g_0 = R^T g e3       gravity direction seen from the body
    v_0 = R^T p_dot = v
    p_0 = R^T p

Each family evolves by the same binomial convolution as the attitude ladder,

    a_{k+1} = sum_n C(k,n) S^T(nu_n) a_{k-n},     a in {g, v, p}

with exact forced identities (convention resolved against Newton-Euler, see
below):

    g_k' = g_{k+1} - G_k M
    v_k' = v_{k+1} - g_k - V_k M + (1/m) Omega_k F
    p_k' = p_{k+1} + v_k - P_k M

Sign convention: with g_0 = +R^T g e3 the gravity coupling enters v_k' and the
combined observables with a minus sign (v_dot = F/m - S(nu) v - g R^T e3). The
combined low-order ladder is

    z_0 = p_0
    z_k = p_k + alpha_k v_{k-1} - beta_k g_{k-2}
    Z_k = P_k + alpha_k V_{k-1} - beta_k G_{k-2}
    Xi_k = (alpha_k / m) Omega_{k-1}
    z_k' = z_{k+1} - Z_k M + Xi_k F

with alpha_k = k and beta_k = alpha_{k-1} + beta_{k-1} = k(k-1)/2.

Coefficient recursions (Omega_0 = I, G_0 = V_0 = P_0 = 0):

    G*_{k+1}  = sum_n C(k,n) S^T(g_n) J^{-1} H_{k-n}
    G**_{k+1} = sum_n C(k,n) S^T(nu_n) G_{k-n}
    G_k = G*_k + G**_k            (same shape for V with S^T(v_n), P with S^T(p_n))
    Omega_{k+1} = sum_n C(k,n) S^T(nu_n) Omega_{k-n}

The starred-star recursions are the product-rule forms; an alternative variant
with an extra J^{-1} factor (and Omega driven by S^T(v_n)) can be enabled via
`literal_coeff_variant=True` for comparison runs. Only the product-rule form
passes the finite-difference oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attitude import AttitudeLadder, binomial_table, conv_mat, conv_vec
from .rigidbody import E3, BodyParams, RigidBodyState, skew_stack

# Internal ladders are built two entries past the truncation so that the
# combined observables (whose composition shifts indices by up to 2) and the
# derivative oracles can reach one index beyond N_z.
EXTRA_DEPTH = 2


@dataclass
class PositionLadder:
    """Arrays over ladder index k; vectors (L, 3), matrices (L, 3, 3)."""

    g: np.ndarray
    v: np.ndarray
    p: np.ndarray
    G: np.ndarray
    V: np.ndarray
    Omega: np.ndarray
    P: np.ndarray
    z: np.ndarray
    Z: np.ndarray
    Xi: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray

    def __len__(self):
        return self.g.shape[0]


def alpha_beta(L: int):
    """Combined-ladder coefficients alpha_k = k, beta_k = k(k-1)/2 (ints)."""
    alpha = np.arange(L, dtype=int)
    beta = np.zeros(L, dtype=int)
    for k in range(1, L):
        beta[k] = alpha[k - 1] + beta[k - 1]
    return alpha, beta


def base_observables(state: RigidBodyState, params: BodyParams):
    """g_0, v_0, p_0 for a physical state."""
    g0 = params.g * (state.R.T @ E3)
    v0 = state.v.copy()
    p0 = state.R.T @ state.p
    return g0, v0, p0


def ladder_vectors(a0: np.ndarray, ST_nu: np.ndarray, L: int, C: np.ndarray) -> np.ndarray:
    """Binomial-convolution ladder a_0..a_{L-1} driven by the S^T(nu_n) stack."""
    a = np.zeros((L, 3))
    a[0] = a0
    for k in range(L - 1):
        a[k + 1] = conv_vec(C[k, : k + 1], ST_nu[: k + 1], a[k::-1])
    return a


def coefficient_matrices(att: AttitudeLadder, g: np.ndarray, v: np.ndarray, p: np.ndarray,
                         params: BodyParams, L: int, literal_coeff_variant: bool = False):
    """G, V, Omega, P stacks of length L from ladder entries.

    Requires attitude arrays (nu, H) of length >= L - 1.
    """
    if len(att) < L - 1:
        raise ValueError(f"attitude ladder length {len(att)} < required {L - 1}")
    C = binomial_table(L)
    J_inv = params.J_inv
    ST_nu = -skew_stack(att.nu[: L - 1])
    ST_g = -skew_stack(g[: L - 1])
    ST_v = -skew_stack(v[: L - 1])
    ST_p = -skew_stack(p[: L - 1])
    JiH = J_inv @ att.H[: L - 1]

    G = np.zeros((L, 3, 3))
    V = np.zeros((L, 3, 3))
    P = np.zeros((L, 3, 3))
    Omega = np.zeros((L, 3, 3))
    Omega[0] = np.eye(3)
    om_driver = ST_v if literal_coeff_variant else ST_nu
    for k in range(L - 1):
        crow = C[k, : k + 1]
        star_G = conv_mat(crow, ST_g[: k + 1], JiH[k::-1])
        star_V = conv_mat(crow, ST_v[: k + 1], JiH[k::-1])
        star_P = conv_mat(crow, ST_p[: k + 1], JiH[k::-1])
        if literal_coeff_variant:
            dstar_G = conv_mat(crow, ST_nu[: k + 1], (J_inv @ G[k::-1]))
            dstar_V = conv_mat(crow, ST_nu[: k + 1], (J_inv @ V[k::-1]))
            dstar_P = conv_mat(crow, ST_nu[: k + 1], (J_inv @ P[k::-1]))
        else:
            dstar_G = conv_mat(crow, ST_nu[: k + 1], G[k::-1])
            dstar_V = conv_mat(crow, ST_nu[: k + 1], V[k::-1])
            dstar_P = conv_mat(crow, ST_nu[: k + 1], P[k::-1])
        G[k + 1] = star_G + dstar_G
        V[k + 1] = star_V + dstar_V
        P[k + 1] = star_P + dstar_P
        Omega[k + 1] = conv_mat(crow, om_driver[: k + 1], Omega[k::-1])
    return G, V, Omega, P


def compose_combined(g, v, p, G, V, Omega, P, params: BodyParams):
    """z, Z, Xi stacks from the family ladders (minus-sign gravity coupling)."""
    L = g.shape[0]
    alpha, beta = alpha_beta(L)
    z = np.zeros((L, 3))
    Z = np.zeros((L, 3, 3))
    Xi = np.zeros((L, 3, 3))
    z[0] = p[0]
    for k in range(1, L):
        z[k] = p[k] + alpha[k] * v[k - 1]
        Z[k] = P[k] + alpha[k] * V[k - 1]
        Xi[k] = (alpha[k] / params.m) * Omega[k - 1]
        if k >= 2:
            z[k] -= beta[k] * g[k - 2]
            Z[k] -= beta[k] * G[k - 2]
    return z, Z, Xi, alpha, beta


def build_position_ladder(state: RigidBodyState, att: AttitudeLadder, params: BodyParams,
                          N_z: int, literal_coeff_variant: bool = False) -> PositionLadder:
    """All position-side ladders for a physical state, filled to N_z + 2 entries."""
    if N_z < 1:
        raise ValueError("N_z must be >= 1")
    L = N_z + EXTRA_DEPTH
    if len(att) < L - 1:
        raise ValueError(f"attitude ladder length {len(att)} < required {L - 1} for N_z={N_z}")
    C = binomial_table(L)
    ST_nu = -skew_stack(att.nu[: L - 1])
    g0, v0, p0 = base_observables(state, params)
    g = ladder_vectors(g0, ST_nu, L, C)
    v = ladder_vectors(v0, ST_nu, L, C)
    p = ladder_vectors(p0, ST_nu, L, C)
    G, V, Omega, P = coefficient_matrices(att, g, v, p, params, L, literal_coeff_variant)
    z, Z, Xi, alpha, beta = compose_combined(g, v, p, G, V, Omega, P, params)
    return PositionLadder(g=g, v=v, p=p, G=G, V=V, Omega=Omega, P=P,
                          z=z, Z=Z, Xi=Xi, alpha=alpha, beta=beta)


def position_input_rows(ladder: PositionLadder, N_z: int) -> np.ndarray:
    """Stacked input-matrix rows [Xi_k, -Z_k] for k = 0..N_z-1, shape (3 N_z, 6)."""
    B = np.zeros((3 * N_z, 6))
    for k in range(N_z):
        B[3 * k : 3 * k + 3, 0:3] = ladder.Xi[k]
        B[3 * k : 3 * k + 3, 3:6] = -ladder.Z[k]
    return B


def assemble_position_system(params: BodyParams, N_z: int):
    """Return (A_z, b_z) with A_z the 3 N_z shift and b_z(ladder) -> (3 N_z, 6)."""
    from .attitude import block_shift_matrix

    A = block_shift_matrix(N_z)

    def b_z(ladder: PositionLadder) -> np.ndarray:
        if len(ladder) < N_z:
            raise ValueError("ladder shorter than truncation")
        return position_input_rows(ladder, N_z)

    return A, b_z
