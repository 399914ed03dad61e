"""Attitude observable ladder and the lifted attitude system.

The ladder stacks successive time derivatives of the body angular velocity along
the unforced flow:

    nu_0 = nu,   gamma_k = J nu_k
    nu_{k+1} = J^{-1} sum_{n=0}^{k} C(k,n) S(gamma_n) nu_{k-n}

Under a torque M the exact forced identity is

    d/dt nu_k = nu_{k+1} + J^{-1} H_k M
    h_k = S(gamma_k) J^{-1} - S(nu_k),   H_0 = I
    H_{k+1} = sum_{n=0}^{k} C(k,n) h_n H_{k-n}

Truncating at N_nu entries gives a linear block-shift system with a
state-dependent input matrix; per-axis regrouping puts the shift into Jordan
form (three nilpotent Jordan blocks).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rigidbody import BodyParams, skew_stack

# Binomial tables are exact integers; growth past this order would start to lose
# float precision when the rows are consumed by the recursions.
MAX_LADDER = 64

_BINOM_CACHE: dict[int, np.ndarray] = {}


def binomial_table(N: int) -> np.ndarray:
    """Float array C with C[k, n] = binomial(k, n), rows exact for N <= 64."""
    if N > MAX_LADDER:
        raise ValueError(f"ladder order {N} exceeds guard {MAX_LADDER}")
    if N not in _BINOM_CACHE:
        rows = [[1]]
        for k in range(1, N + 1):
            prev = rows[-1]
            rows.append([1] + [prev[n - 1] + prev[n] for n in range(1, k)] + [1])
        C = np.zeros((N + 1, N + 1))
        for k, row in enumerate(rows):
            C[k, : k + 1] = row
        _BINOM_CACHE[N] = C
    return _BINOM_CACHE[N]


def conv_vec(crow: np.ndarray, ops: np.ndarray, vecs_rev: np.ndarray) -> np.ndarray:
    """sum_n crow[n] * ops[n] @ vecs_rev[n] for stacked 3x3 ops and 3-vectors."""
    return np.einsum("n,nij,nj->i", crow, ops, vecs_rev)


def conv_mat(crow: np.ndarray, ops: np.ndarray, mats_rev: np.ndarray) -> np.ndarray:
    """sum_n crow[n] * ops[n] @ mats_rev[n] for stacked 3x3 operands."""
    return np.einsum("n,nij,njk->ik", crow, ops, mats_rev)


@dataclass
class TruncationConfig:
    """Ladder lengths: N_nu attitude entries, N_z combined-position entries."""

    N_nu: int
    N_z: int

    def __post_init__(self):
        if self.N_nu < 1 or self.N_z < 1:
            raise ValueError("truncation orders must be >= 1")
        if max(self.N_nu, self.N_z) > MAX_LADDER:
            raise ValueError(f"truncation order exceeds guard {MAX_LADDER}")

    @property
    def n_nu(self) -> int:
        return 3 * self.N_nu

    @property
    def n_z(self) -> int:
        return 3 * self.N_z

    @property
    def dim(self) -> int:
        return self.n_nu + self.n_z


@dataclass
class AttitudeLadder:
    """Arrays nu, gamma of shape (N, 3) and h, H of shape (N, 3, 3)."""

    nu: np.ndarray
    gamma: np.ndarray
    h: np.ndarray
    H: np.ndarray

    def __len__(self):
        return self.nu.shape[0]


def build_attitude_ladder(nu, params: BodyParams, N_nu: int) -> AttitudeLadder:
    """Fill the ladder to N_nu entries from nu_0 = nu (includes h_k, H_k)."""
    if N_nu < 1:
        raise ValueError("N_nu must be >= 1")
    C = binomial_table(N_nu)
    J, J_inv = params.J, params.J_inv

    nus = np.zeros((N_nu, 3))
    gammas = np.zeros((N_nu, 3))
    nus[0] = np.asarray(nu, dtype=float)
    gammas[0] = J @ nus[0]
    Sg = np.zeros((N_nu, 3, 3))
    Sg[0] = skew_stack(gammas[:1])[0]
    for k in range(N_nu - 1):
        nus[k + 1] = J_inv @ conv_vec(C[k, : k + 1], Sg[: k + 1], nus[k::-1])
        gammas[k + 1] = J @ nus[k + 1]
        Sg[k + 1] = skew_stack(gammas[k + 1 : k + 2])[0]

    ladder = AttitudeLadder(nu=nus, gamma=gammas, h=None, H=None)
    ladder.H = build_H_matrices(ladder, params)
    return ladder


def build_H_matrices(ladder: AttitudeLadder, params: BodyParams) -> np.ndarray:
    """Torque-coupling matrices H_k from the ladder entries (fills ladder.h too)."""
    N = len(ladder)
    C = binomial_table(N)
    Snu = skew_stack(ladder.nu)
    Sg = skew_stack(ladder.gamma)
    h = Sg @ params.J_inv - Snu
    H = np.zeros((N, 3, 3))
    H[0] = np.eye(3)
    for k in range(N - 1):
        H[k + 1] = conv_mat(C[k, : k + 1], h[: k + 1], H[k::-1])
    ladder.h = h
    return H


def h_from_components(nu: np.ndarray, gamma: np.ndarray, params: BodyParams) -> np.ndarray:
    """h_k stack for given (N,3) nu/gamma arrays (used by the lifted simulator)."""
    return skew_stack(gamma) @ params.J_inv - skew_stack(nu)


def extend_H(h: np.ndarray, depth: int) -> np.ndarray:
    """H recursion to `depth` entries given h_k (entries beyond len(h) treated as 0)."""
    C = binomial_table(depth)
    H = np.zeros((depth, 3, 3))
    H[0] = np.eye(3)
    n_h = h.shape[0]
    for k in range(depth - 1):
        m = min(k + 1, n_h)
        H[k + 1] = conv_mat(C[k, :m], h[:m], H[k : k - m : -1] if k - m >= 0 else H[k::-1])
    return H


def block_shift_matrix(N: int, block: int = 3) -> np.ndarray:
    """Nilpotent shift: identity blocks on the first block-superdiagonal."""
    A = np.zeros((N * block, N * block))
    for k in range(N - 1):
        A[k * block : (k + 1) * block, (k + 1) * block : (k + 2) * block] = np.eye(block)
    return A


def assemble_attitude_system(params: BodyParams, N_nu: int):
    """Return (A_nu, b_nu) with A_nu the 3N x 3N shift and b_nu(ladder) -> 3N x 3."""
    A = block_shift_matrix(N_nu)

    def b_nu(ladder: AttitudeLadder) -> np.ndarray:
        if len(ladder) < N_nu:
            raise ValueError("ladder shorter than truncation")
        return (params.J_inv @ ladder.H[:N_nu]).reshape(3 * N_nu, 3)

    return A, b_nu


def jordan_permutation(N: int, blocks: int = 3) -> np.ndarray:
    """Index map perm with x_jordan[j] = x_block[perm[j]].

    Block layout stores entry k of axis i at 3k+i; the Jordan layout groups each
    axis into one chain, placing it at i*N+k. Applying the permutation to the
    block shift yields blkdiag of `blocks` nilpotent N x N Jordan blocks.
    """
    perm = np.empty(N * blocks, dtype=int)
    for i in range(blocks):
        for k in range(N):
            perm[i * N + k] = blocks * k + i
    return perm


def permutation_matrix(perm: np.ndarray) -> np.ndarray:
    T = np.zeros((perm.size, perm.size))
    T[np.arange(perm.size), perm] = 1.0
    return T
