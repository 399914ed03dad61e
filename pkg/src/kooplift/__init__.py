"""Analytical Koopman lifting of rigid-body attitude and position dynamics.

Library layout:

    rigidbody  exact Newton-Euler dynamics, rotation utilities, RK4 integration
    attitude   angular-velocity observable ladder and lifted attitude system
    position   gravity/velocity/position ladders and the combined z-chain
    lifted     combined lifted system, exact lifting, simulation, reconstruction
    analysis   Eulerian norm bounds, validity horizons, controllability checks
    harness    scenario runner, error metrics, CSV/JSON emission
    presets    named inertias and shipped scenario files
    quadrotor  16-state reduced model, Riccati solver, LQI, closed-loop sim
    cli        command-line interface
"""

from .attitude import TruncationConfig, build_attitude_ladder, jordan_permutation
from .errors import (
    ConfigError,
    DegenerateGravityObservable,
    GimbalProximity,
    InfiniteHorizon,
    KoopliftError,
    NoConvergence,
    NonFiniteState,
    NotStabilizable,
    RankDeficientB,
    SymmetryViolation,
    ZeroNormalizer,
)
from .lifted import LiftedState, LiftedSystem, assemble_lifted_system, lift, reconstruct
from .rigidbody import BodyParams, RigidBodyState, integrate, rotation_from_euler, skew

__all__ = [
    "BodyParams",
    "ConfigError",
    "DegenerateGravityObservable",
    "GimbalProximity",
    "InfiniteHorizon",
    "KoopliftError",
    "LiftedState",
    "LiftedSystem",
    "NoConvergence",
    "NonFiniteState",
    "NotStabilizable",
    "RankDeficientB",
    "SymmetryViolation",
    "TruncationConfig",
    "ZeroNormalizer",
    "assemble_lifted_system",
    "build_attitude_ladder",
    "integrate",
    "jordan_permutation",
    "lift",
    "reconstruct",
    "rotation_from_euler",
    "skew",
]

__version__ = "0.1.0"
