"""Exception types shared across the package."""


class KoopliftError(Exception):
    """Base class for all package errors."""


class ConfigError(KoopliftError):
    """Invalid scenario or controller configuration."""


class GimbalProximity(KoopliftError):
    """Pitch too close to +-pi/2 for Euler-rate extraction."""


class NonFiniteState(KoopliftError):
    """Integration produced NaN/inf (divergence)."""

    def __init__(self, t, message=None):
        self.t = float(t)
        super().__init__(message or f"state became non-finite at t={t:.6g} s")


class InfiniteHorizon(KoopliftError):
    """Validity horizon is unbounded (zero initial angular momentum)."""


class ZeroNormalizer(KoopliftError):
    """Error metric undefined: initial value and trajectory max both vanish."""


class DegenerateGravityObservable(KoopliftError):
    """Gravity observable inconsistent or aligned with the gimbal limit."""


class SymmetryViolation(KoopliftError):
    """Inertia not x/y-symmetric; quadrotor reduction invalid."""


class NoConvergence(KoopliftError):
    """Iterative solver hit its iteration guard without converging."""


class NotStabilizable(KoopliftError):
    """Riccati problem has no stabilizing solution."""


class RankDeficientB(KoopliftError):
    """Input matrix lost column rank; least-squares recovery ill-posed."""
