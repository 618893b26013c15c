"""Exception hierarchy shared by all kdvh modules.

Validation failures (bad arguments, out-of-range inputs) raise
DomainError; everything else signals a numerical breakdown of a
specific algorithm and names the stage that failed.
"""


class KdvhError(Exception):
    """Base class for all package errors."""


class DomainError(KdvhError, ValueError):
    """Input outside the mathematically admissible range."""


class NoConvergence(KdvhError, RuntimeError):
    """An iteration (Newton, bisection, continuation) failed to converge."""


class SingularDerivative(KdvhError, RuntimeError):
    """Inverse-function derivative requested where u0' is numerically zero."""


class DegenerateCatastrophe(KdvhError, RuntimeError):
    """Breakup point fails the genericity condition k = -F''' > 0."""


class PastBreakup(KdvhError, RuntimeError):
    """Characteristic solve requested at or beyond the shock time t_c."""


class UnsupportedFlow(KdvhError, ValueError):
    """PDE evolution requested for a hierarchy index without a hardcoded RHS."""


class Instability(KdvhError, RuntimeError):
    """Time integration blew up (NaN or runaway amplitude)."""


class ResolutionLoss(KdvhError, RuntimeError):
    """Spectral tail sentinel tripped: the grid no longer resolves u."""


class DomainTooSmall(KdvhError, ValueError):
    """Periodic box too small for the requested initial data."""


class BoundaryMismatch(KdvhError, RuntimeError):
    """Converged BVP solution deviates from its far-field data beyond budget."""


class OutOfWindow(KdvhError, ValueError):
    """Universality prediction requested outside the resolved (X,T) window."""
