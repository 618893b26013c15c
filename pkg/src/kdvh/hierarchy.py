"""Flows of the KdV hierarchy for m = 1, 2, 3.

The m-th flow perturbs the dispersionless conservation law
u_t = -C_m u^m u_x with dispersive terms carrying even powers of eps:

    m=1:  u_t = -6 u u_x - eps^2 u_xxx
    m=2:  u_t = +30 u^2 u_x + eps^2 (20 u_x u_xx + 10 u u_xxx) + eps^4 u_5x
    m=3:  u_t = -140 u^3 u_x - eps^2 (70 u_x^3 + 280 u u_x u_xx + 70 u^2 u_3x)
               - eps^4 (70 u_2x u_3x + 42 u_x u_4x + 14 u u_5x) - eps^6 u_7x

with C_m = (-1)^(m+1) 2^m (2m+1)!! / m!, so C_1 = 6, C_2 = -30,
C_3 = 140.  Every right-hand side is a perfect x-derivative, so mass
sum(u) dx and the quadratic functional h0 = sum(u^2)/2 dx are conserved
and serve as integrator certificates.  The three right-hand sides are
hardcoded; no attempt is made to generate higher flows symbolically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, UnsupportedFlow

# flows with a hardcoded dispersive right-hand side
EVOLVABLE_M = (1, 2, 3)


def coefficient(m: int) -> float:
    """C_m = (-1)^(m+1) 2^m (2m+1)!!/m!, computed in exact integers."""
    if m < 1 or m != int(m):
        raise DomainError(f"hierarchy index m={m} must be a positive integer")
    m = int(m)
    dfact = 1
    for j in range(1, 2 * m + 2, 2):
        dfact *= j
    fact = 1
    for j in range(2, m + 1):
        fact *= j
    num = (-1) ** (m + 1) * 2 ** m * dfact
    # dfact/m! is integral only after combining with 2^m for general m;
    # keep the ratio exact in floating point instead of asserting it
    return num / fact


@dataclass(frozen=True)
class FlowParams:
    """Hierarchy index, its coefficient, and the dispersion parameter."""
    m: int
    eps: float
    C_m: float = field(init=False)

    def __post_init__(self):
        if self.m < 1:
            raise DomainError(f"hierarchy index m={self.m} must be >= 1")
        if self.eps <= 0:
            raise DomainError(f"dispersion eps={self.eps} must be positive")
        object.__setattr__(self, "C_m", coefficient(self.m))


def _require_evolvable(m: int):
    if m not in EVOLVABLE_M:
        raise UnsupportedFlow(
            f"no hardcoded right-hand side for m={m}; supported: {EVOLVABLE_M}")


def nonlinear_terms(u_hat, grid, eps: float, m: int):
    """Spectrum of all rhs terms except the leading linear dispersion.

    The leading (-1)^m eps^(2m) d^(2m+1)/dx^(2m+1) term is excluded: the
    time stepper integrates it exactly through its Fourier symbol.  All
    products are formed in physical space from 2/3-truncated spectra and
    the result is truncated again.
    """
    _require_evolvable(m)
    mask = grid.dealias_mask
    uh = u_hat * mask

    def d(j):
        return grid.to_phys(uh * grid.ik ** j)

    def mul(a, b):
        # pairwise product, retruncated: keeps cubic and quartic terms
        # alias-free under the 2/3 rule (one-shot triple products feed
        # band-edge content back onto itself and grow exponentially)
        return grid.to_phys(grid.to_hat(a * b) * mask)

    u = grid.to_phys(uh)
    u_x = d(1)
    if m == 1:
        n = -6.0 * u * u_x
    elif m == 2:
        u_xx = d(2)
        u_3x = d(3)
        u2 = mul(u, u)
        n = (30.0 * u2 * u_x
             + eps ** 2 * (20.0 * u_x * u_xx + 10.0 * u * u_3x))
    else:
        u_xx = d(2)
        u_3x = d(3)
        u_4x = d(4)
        u_5x = d(5)
        u2 = mul(u, u)
        u3 = mul(u2, u)
        ux2 = mul(u_x, u_x)
        uux = mul(u, u_x)
        n = (-140.0 * u3 * u_x
             - eps ** 2 * (70.0 * ux2 * u_x + 280.0 * uux * u_xx
                           + 70.0 * u2 * u_3x)
             - eps ** 4 * (70.0 * u_xx * u_3x + 42.0 * u_x * u_4x
                           + 14.0 * u * u_5x))
    return grid.to_hat(n) * mask


def linear_symbol(grid, eps: float, m: int):
    """Fourier symbol of (-1)^m eps^(2m) d^(2m+1)/dx^(2m+1): i eps^(2m) k^(2m+1).

    Purely imaginary for every m, so the integrating factor is unitary.
    """
    _require_evolvable(m)
    return 1j * eps ** (2 * m) * grid.k ** (2 * m + 1)


def rhs(u, grid, eps: float, m: int):
    """Full u_t field for the m-th flow on a periodic grid."""
    u_hat = grid.to_hat(np.asarray(u, dtype=float))
    n_hat = nonlinear_terms(u_hat, grid, eps, m)
    return grid.to_phys(n_hat + linear_symbol(grid, eps, m) * u_hat)


def conserved(u, dx: float):
    """(mass, h0) = (sum u dx, sum u^2/2 dx); exact quadrature on periodic grids."""
    u = np.asarray(u, dtype=float)
    return float(np.sum(u) * dx), float(np.sum(u * u) * 0.5 * dx)
