"""Validity bounds and controllability checks for the truncated lifted model.

Norm bounds on the attitude ladder use Eulerian numbers <n, k> (permutations of
n elements with k descents). Writing iota = ||J^{-1}||, gn = ||gamma(t0)||,
vn = ||nu(t0)|| (spectral / l2 norms throughout):

    ||nu_{k+1}||    <= iota gn vn sum_n <k+1, n> (iota gn)^n vn^{k-n}
    ||gamma_{k+1}|| <= gn vn sum_n <k+1, n> (iota gn)^n vn^{k-n}
    ||H_k||         <= sum_n <k+1, n> (iota gn)^n vn^{k-n}
    ||nu_k'||       <= ||H_k|| iota (gn vn + ||M||)

and relaxed factorial forms obtained via vn <= iota gn and sum_n <m, n> = m!.
The validity horizon of the truncated model is

    t_lim = 1 / (iota gn)                        (unforced)
    t_lim_M = 1 / (iota gn_rms ((k+1) Mint)^{1/k})  (dominantly forced)

with gn_rms the RMS of ||J nu|| along the reference run and Mint the magnitude
of the torque antiderivative at t0.

Controllability of the truncated pair (A, B(x)) reduces to full rank of the
6 x 6 matrix stacking the last Jordan-block rows:

    [[Xi_{N_z-1}, -Z_{N_z-1}],
     [0_3,        J^{-1} H_{N_nu-1}]]
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Optional

import numpy as np

from .attitude import TruncationConfig, build_attitude_ladder
from .errors import InfiniteHorizon
from .lifted import lift
from .position import build_position_ladder
from .rigidbody import BodyParams, RigidBodyState

# Practical-use horizon factors: unforced runs approximate well below
# GOOD_WINDOW_FACTOR * t_lim; divergence onset is observed empirically near
# SWITCH_FACTOR * t_lim. Acceptance gates use the conservative factor.
GOOD_WINDOW_FACTOR = 5.0
SWITCH_FACTOR = 9.0

_EULERIAN_CACHE: dict[int, list[int]] = {0: [1]}


def eulerian_row(n: int) -> list[int]:
    """Row n of the Eulerian triangle as exact integers."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n not in _EULERIAN_CACHE:
        prev = eulerian_row(n - 1)
        row = [0] * n
        for k in range(n):
            a = (k + 1) * (prev[k] if k < len(prev) else 0)
            b = (n - k) * (prev[k - 1] if 0 <= k - 1 < len(prev) else 0)
            row[k] = a + b
        _EULERIAN_CACHE[n] = row
    return list(_EULERIAN_CACHE[n])


def eulerian(n: int, k: int) -> int:
    """Eulerian number <n, k>: permutations of {1..n} with exactly k descents."""
    if k < 0 or n < 0:
        raise ValueError("indices must be nonnegative")
    row = eulerian_row(n)
    return row[k] if k < len(row) else 0


def spectral_norm(A) -> float:
    return float(np.linalg.norm(np.atleast_2d(np.asarray(A, float)), 2))


@dataclass
class BoundReport:
    """Ladder norm bounds for k = 0..K plus the validity horizons."""

    K: int
    iota: float                  # ||J^{-1}||
    gamma_norm: float            # ||gamma(t0)||
    nu_norm: float               # ||nu(t0)||
    torque_norm: float
    bound_nu: np.ndarray         # bound_nu[k] >= ||nu_k||
    bound_gamma: np.ndarray
    bound_H: np.ndarray          # bound_H[k] >= ||H_k||
    bound_nu_dot: np.ndarray
    relaxed_nu: np.ndarray
    relaxed_H: np.ndarray
    relaxed_nu_dot: np.ndarray
    t_lim: float
    t_lim_M: Optional[float] = None


def attitude_bounds(params: BodyParams, gamma0_norm: float, nu0_norm: float, K: int,
                    torque_norm: float = 0.0) -> BoundReport:
    """Eulerian-coefficient and relaxed factorial bounds for ladder orders 0..K."""
    if gamma0_norm < 0 or nu0_norm < 0 or torque_norm < 0:
        raise ValueError("norms must be nonnegative")
    iota = spectral_norm(params.J_inv)
    x = iota * gamma0_norm

    bound_nu = np.zeros(K + 1)
    bound_gamma = np.zeros(K + 1)
    bound_H = np.zeros(K + 1)
    bound_nu[0] = nu0_norm
    bound_gamma[0] = gamma0_norm
    for k in range(K):
        row = eulerian_row(k + 1)
        s = sum(row[n] * x ** n * nu0_norm ** (k - n) for n in range(k + 1))
        bound_gamma[k + 1] = gamma0_norm * nu0_norm * s
        bound_nu[k + 1] = iota * bound_gamma[k + 1]
    for k in range(K + 1):
        row = eulerian_row(k + 1)
        bound_H[k] = sum(row[n] * x ** n * nu0_norm ** (k - n) for n in range(k + 1))
    bound_nu_dot = bound_H * iota * (gamma0_norm * nu0_norm + torque_norm)

    relaxed_nu = np.zeros(K + 1)
    relaxed_nu[0] = nu0_norm
    for k in range(K):
        relaxed_nu[k + 1] = x ** (k + 2) * factorial(k + 1)
    relaxed_H = np.array([x ** k * factorial(k + 1) for k in range(K + 1)])
    if gamma0_norm > 0:
        relaxed_nu_dot = np.array([
            x ** (k + 1) * factorial(k + 1) * (x + torque_norm / gamma0_norm)
            for k in range(K + 1)
        ])
        tl = 1.0 / (iota * gamma0_norm)
    else:
        relaxed_nu_dot = np.zeros(K + 1)
        tl = np.inf

    return BoundReport(
        K=K, iota=iota, gamma_norm=gamma0_norm, nu_norm=nu0_norm,
        torque_norm=torque_norm,
        bound_nu=bound_nu, bound_gamma=bound_gamma, bound_H=bound_H,
        bound_nu_dot=bound_nu_dot,
        relaxed_nu=relaxed_nu, relaxed_H=relaxed_H, relaxed_nu_dot=relaxed_nu_dot,
        t_lim=tl,
    )


def observable_bound(a0_norm: float, params: BodyParams, gamma0_norm: float,
                     nu0_norm: float, K: int) -> np.ndarray:
    """Bound on the position-side ladders: ||a_{k+1}|| for a in {g, v, p}, k = 0..K-1."""
    iota = spectral_norm(params.J_inv)
    x = iota * gamma0_norm
    out = np.zeros(K + 1)
    out[0] = a0_norm
    for k in range(K):
        row = eulerian_row(k + 1)
        s = sum(row[n] * x ** n * nu0_norm ** (k - n) for n in range(k + 1))
        out[k + 1] = a0_norm * nu0_norm * s
    return out


def t_lim(params: BodyParams, gamma0) -> float:
    """Unforced validity horizon 1 / (||J^{-1}|| ||gamma(t0)||)."""
    gn = float(np.linalg.norm(np.asarray(gamma0, float)))
    if gn == 0.0:
        raise InfiniteHorizon("gamma(t0) = 0: unforced rest never diverges")
    return 1.0 / (spectral_norm(params.J_inv) * gn)


def t_lim_forced(params: BodyParams, gamma_rms: float, M_int_t0: float, k: int) -> float:
    """Forced validity horizon 1 / (||J^{-1}|| gamma_rms ((k+1) Mint)^{1/k})."""
    if gamma_rms <= 0:
        raise ValueError("gamma_rms must be positive")
    if M_int_t0 <= 0:
        raise ValueError("M_int_t0 must be positive")
    if k < 1:
        raise ValueError("k must be >= 1")
    return 1.0 / (spectral_norm(params.J_inv) * gamma_rms * ((k + 1) * M_int_t0) ** (1.0 / k))


@dataclass
class ControllabilityReport:
    """Numeric-rank verdict on the stacked last-Jordan-row matrix."""

    matrix: np.ndarray
    rank: int
    full_rank: bool
    singular_values: np.ndarray
    tolerance: float
    config: Optional[TruncationConfig] = None
    extras: dict = field(default_factory=dict)


def numeric_rank(M: np.ndarray, tol: Optional[float] = None):
    sv = np.linalg.svd(M, compute_uv=False)
    if tol is None:
        tol = max(M.shape) * np.finfo(float).eps * (sv[0] if sv.size else 0.0)
    rank = int(np.sum(sv > tol))
    return rank, sv, float(tol)


def equilibrate(M: np.ndarray) -> np.ndarray:
    """Normalize rows then columns to unit norm (zero lines left untouched).

    Diagonal scalings preserve rank exactly; without them the mixed force/torque
    units make the two blocks differ by ~1e5 in magnitude at higher truncations
    and the SVD tolerance misclassifies nonsingular matrices.
    """
    M = M.copy()
    rn = np.linalg.norm(M, axis=1)
    rn[rn == 0] = 1.0
    M /= rn[:, None]
    cn = np.linalg.norm(M, axis=0)
    cn[cn == 0] = 1.0
    M /= cn[None, :]
    return M


def controllability_check(Xi_last: np.ndarray, Z_last: np.ndarray, H_last: np.ndarray,
                          params: BodyParams, tol: Optional[float] = None,
                          scale: bool = True) -> ControllabilityReport:
    """Full-rank test of [[Xi_last, -Z_last], [0, J^{-1} H_last]].

    The SVD runs on the row/column-equilibrated matrix by default (rank
    invariant, numerically scale-free); the raw matrix is stored in the report.
    Rank tolerance defaults to max_dim * eps * sigma_max and is always recorded.
    """
    M = np.zeros((6, 6))
    M[0:3, 0:3] = Xi_last
    M[0:3, 3:6] = -Z_last
    M[3:6, 3:6] = params.J_inv @ H_last
    rank, sv, used_tol = numeric_rank(equilibrate(M) if scale else M, tol)
    return ControllabilityReport(
        matrix=M, rank=rank, full_rank=(rank == M.shape[0]),
        singular_values=sv, tolerance=used_tol,
        extras={"equilibrated": scale},
    )


def controllability_at_state(state: RigidBodyState, params: BodyParams,
                             config: TruncationConfig, tol: Optional[float] = None
                             ) -> ControllabilityReport:
    """Evaluate the controllability criterion at a physical state."""
    ls = lift(state, params, config)
    rep = controllability_check(
        ls.pos.Xi[config.N_z - 1], ls.pos.Z[config.N_z - 1],
        ls.att.H[config.N_nu - 1], params, tol,
    )
    rep.config = config
    return rep
