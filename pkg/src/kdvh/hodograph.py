"""Characteristic solution of the dispersionless flow and its breakup.

The eps = 0 equation u_t = -C_m u^m u_x is solved implicitly along
characteristics:

    u(x, t) = u0(xi),   x = xi + C_m u0(xi)^m t.

The map xi -> x stays strictly increasing while 1 + m C_m u0^(m-1) u0' t
> 0 everywhere; the first failure time is

    t_c = 1 / (m max_xi phi(xi)),   phi = -C_m u0^(m-1) u0',

attained at the maximizing foot xi*.  Equivalently, on the decreasing
branch u is the root of

    F(u; x, t) = -x + C_m u^m t + f_L(u) = 0

and the catastrophe is the point where F = F' = F'' = 0 with the
genericity constant k = -F'''(u_c) > 0 and the quartic coefficient
F4 = F''''(u_c) feeding the critical-window constants downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import (DegenerateCatastrophe, DomainError, NoConvergence,
                     PastBreakup)
from .hierarchy import coefficient
from .profiles import InitialProfile, branch_derivatives, invert_branch


@dataclass(frozen=True)
class CharacteristicSolution:
    """One point of the implicit solution: u = u0(xi) carried to (x, t)."""
    xi: float
    u: float
    x: float
    t: float
    residual: float


@dataclass(frozen=True)
class CatastrophePoint:
    """Generic first-breakup data of the m-th dispersionless flow."""
    u_c: float
    x_c: float
    t_c: float
    xi_star: float
    k: float
    F4: float
    m: int
    residuals: tuple  # (F, F', F'') at the point


def F_eval(u: float, x: float, t: float, p: InitialProfile, m: int,
           order: int = 0) -> float:
    """d^order/du^order of F(u; x, t) = -x + C_m u^m t + f_L(u)."""
    if not 0 <= order <= 4:
        raise DomainError(f"order {order} not in 0..4")
    C_m = coefficient(m)
    if order == 0:
        return -x + C_m * u ** m * t + invert_branch(p, "left", u)
    # monomial factor m!/(m-order)! u^(m-order), zero once order > m
    if order <= m:
        mono = C_m * t * u ** (m - order)
        for j in range(m, m - order, -1):
            mono *= j
    else:
        mono = 0.0
    f = branch_derivatives(p, "left", u, max_order=order)
    return mono + f[order - 1]


def _phi(p: InitialProfile, m: int, xi):
    u = np.asarray(p(xi, 0), dtype=float)
    return -coefficient(m) * u ** (m - 1) * np.asarray(p(xi, 1), dtype=float)


def _phi_derivs(p: InitialProfile, m: int, xi: float):
    """phi, phi', phi'' at a scalar xi from the profile's closed forms."""
    C_m = coefficient(m)
    u0 = float(p(xi, 0))
    u1 = float(p(xi, 1))
    u2 = float(p(xi, 2))
    u3 = float(p(xi, 3))
    mm = m - 1
    phi = -C_m * u0 ** mm * u1
    dphi = -C_m * (mm * u0 ** (mm - 1) * u1 * u1 + u0 ** mm * u2)
    d2phi = -C_m * (mm * (mm - 1) * u0 ** max(mm - 2, 0) * u1 ** 3
                    + 3.0 * mm * u0 ** (mm - 1) * u1 * u2
                    + u0 ** mm * u3)
    return phi, dphi, d2phi


@lru_cache(maxsize=64)
def _catastrophe_cached(p: InitialProfile, m: int) -> CatastrophePoint:
    # scan window [x_M - W, x_M]: phi -> 0 in the tail, so widen W until
    # the data is negligible at the edge
    W = 4.0
    for _ in range(60):
        if abs(float(p(p.x_min - W, 0))) < 1e-6:
            break
        W *= 1.5
    else:
        raise NoConvergence("profile tail does not decay on the left")
    xi_grid = np.linspace(p.x_min - W, p.x_min, 4001)[:-1]
    phi = _phi(p, m, xi_grid)
    xi = float(xi_grid[np.argmax(phi)])

    for _ in range(60):
        _, d1, d2 = _phi_derivs(p, m, xi)
        if d2 >= 0.0:
            raise NoConvergence("maximization left the concave region")
        step = -d1 / d2
        xi += step
        if abs(step) < 1e-14 * max(1.0, abs(xi)):
            break
    else:
        raise NoConvergence("stationary point of phi did not converge")

    phi_star, _, _ = _phi_derivs(p, m, xi)
    if phi_star <= 0.0:
        raise DegenerateCatastrophe(
            f"max phi = {phi_star:.3e} <= 0: no breakup on this branch")
    C_m = coefficient(m)
    t_c = 1.0 / (m * phi_star)
    u_c = float(p(xi, 0))
    x_c = xi + C_m * u_c ** m * t_c

    res = tuple(F_eval(u_c, x_c, t_c, p, m, order=j) for j in range(3))
    k = -F_eval(u_c, x_c, t_c, p, m, order=3)
    if abs(k) < 1e-8:
        raise DegenerateCatastrophe(
            f"|k| = {abs(k):.3e} < 1e-8: cubic coefficient vanishes")
    if k < 0.0:
        raise DegenerateCatastrophe(f"k = {k:.3e} < 0: wrong branch")
    F4 = F_eval(u_c, x_c, t_c, p, m, order=4)
    return CatastrophePoint(u_c, x_c, t_c, xi, k, F4, m, res)


def catastrophe(p: InitialProfile, m: int) -> CatastrophePoint:
    """Locate the first gradient catastrophe of the m-th flow.

    Dense scan of phi over the decreasing branch followed by 1-D Newton
    maximization; the minimal breakup time comes out automatically.  The
    three-equation system F = F' = F'' = 0 is evaluated afterwards as a
    residual check (see refine_newton3 for the independent route).
    """
    if m < 1 or m != int(m):
        raise DomainError(f"hierarchy index m={m} must be a positive integer")
    return _catastrophe_cached(p, int(m))


def refine_newton3(p: InitialProfile, m: int, start: CatastrophePoint,
                   max_iter: int = 40) -> tuple:
    """Newton refinement of the 3-system (F, F', F'') = 0 in (u, x, t).

    Cross-validates the 1-D maximization route; returns (u, x, t) and
    the final residual norm.
    """
    u, x, t = start.u_c, start.x_c, start.t_c
    C_m = coefficient(m)
    for _ in range(max_iter):
        G = np.array([F_eval(u, x, t, p, m, j) for j in range(3)])
        if np.max(np.abs(G)) < 1e-13:
            break
        # rows: dF^(j)/d(u, x, t); only F itself sees x
        J = np.zeros((3, 3))
        for j in range(3):
            J[j, 0] = F_eval(u, x, t, p, m, j + 1)
            J[j, 1] = -1.0 if j == 0 else 0.0
            mono = 1.0
            for i in range(m, m - j, -1):
                mono *= i
            J[j, 2] = C_m * mono * u ** (m - j) if j <= m else 0.0
        du, dx, dt = np.linalg.solve(J, -G)
        u, x, t = u + du, x + dx, t + dt
    G = np.array([F_eval(u, x, t, p, m, j) for j in range(3)])
    return (u, x, t), float(np.max(np.abs(G)))


def solve_u(x: float, t: float, p: InitialProfile, m: int) -> CharacteristicSolution:
    """Invert the characteristic map at one point (x, t), t >= 0.

    The foot obeys xi = x - C_m u0(xi)^m t with speeds in (-|C_m|, 0],
    so xi is bracketed by [x, x + |C_m| t].  Past the breakup time the
    bracket is scanned first and a folded (multivalued) map raises
    PastBreakup.
    """
    if t < 0:
        raise DomainError(f"t={t} must be nonnegative")
    if t == 0.0:
        u = float(p(x, 0))
        return CharacteristicSolution(x, u, x, t, 0.0)
    C_m = coefficient(m)

    def h(xi):
        return xi + C_m * float(p(xi, 0)) ** m * t - x

    lo, hi = x, x + abs(C_m) * t
    cp = catastrophe(p, m)
    if t >= cp.t_c:
        xi_s = np.linspace(lo, hi, 1025)
        h_s = xi_s + C_m * np.asarray(p(xi_s, 0), dtype=float) ** m * t - x
        if np.any(np.diff(h_s) < 0.0):
            raise PastBreakup(
                f"t={t} >= t_c={cp.t_c:.8g} and the foot map folds over")
    h_lo, h_hi = h(lo), h(hi)
    if h_lo > 0.0 or h_hi < 0.0:
        raise NoConvergence("characteristic bracket failed; data not admissible")
    if h_lo == 0.0:
        xi = lo
    elif h_hi == 0.0:
        xi = hi
    else:
        xi = brentq(h, lo, hi, xtol=1e-14, rtol=8.9e-16)
    u = float(p(xi, 0))
    return CharacteristicSolution(xi, u, x, t, abs(h(xi)))


def minimum_trajectory(p: InitialProfile, m: int, t: float) -> float:
    """Position of the solution minimum: x_M + C_m (-1)^m t.

    The minimum value -1 rides its own characteristic with speed
    C_m (-1)^m, negative for every m, so the trough drifts left.
    """
    return p.x_min + coefficient(m) * (-1.0) ** m * t
