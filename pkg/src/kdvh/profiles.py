"""Admissible initial data: single negative analytic humps.

A profile is a smooth function u0 with

    u0(x) < 0,   u0 -> 0 as |x| -> oo,   |u0(x)| = O(|x|^(-3-s)),

a unique minimum at x_M normalized to u0(x_M) = -1, u0''(x_M) > 0, and
strict monotonicity on either side of x_M.  The decreasing branch
(x <= x_M) has an inverse f_L and the increasing branch an inverse f_R,
both defined for u in (-1, 0).  Derivatives of the inverses follow from
the inverse-function recurrences

    f'   = 1/g'
    f''  = -g''/g'^3
    f''' = (3 g''^2 - g' g''')/g'^5
    f'''' = (10 g' g'' g''' - g'^2 g'''' - 15 g''^3)/g'^7

with g^(j) = u0^(j) evaluated at x = f(u).  Closed-form derivatives to
order 4 are required of every profile: the breakup constants depend on
third and fourth derivatives of f_L, and differencing an inverse
function near its singular endpoint u = -1 loses too many digits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, NoConvergence, SingularDerivative

# the inverse map is clamped to u in (-1 + DOMAIN_CLAMP, -DOMAIN_CLAMP):
# f' is singular at u = -1 and |f| is unbounded at u = 0
DOMAIN_CLAMP = 1e-8


class InitialProfile:
    """Closed-form hump with derivatives to order 4.

    Parameters
    ----------
    name : str
        Identifier used in configs and reports.
    derivs : callable
        ``derivs(x, order)`` returning u0^(order)(x) for order 0..4,
        vectorized over x.
    x_min : float
        Location of the minimum x_M.
    decay_exponent : float
        The s in the far-field bound |u0| <= C |x|^(-3-s).
    theta, sigma : float
        Analyticity metadata (sector half-angle and width); stored,
        never used numerically.
    """

    def __init__(self, name: str, derivs: Callable, x_min: float = 0.0,
                 decay_exponent: float = 1.0, theta: float = np.pi / 4,
                 sigma: float = 1.0):
        self.name = name
        self._derivs = derivs
        self.x_min = float(x_min)
        self.decay_exponent = float(decay_exponent)
        self.theta = float(theta)
        self.sigma = float(sigma)

    def __call__(self, x, order: int = 0):
        return self._derivs(x, order)

    def __repr__(self):
        return f"InitialProfile({self.name!r}, x_min={self.x_min})"


def _sech2_derivs(x, order):
    x = np.asarray(x, dtype=float)
    # sech(x) = 2 e^{-|x|} / (1 + e^{-2|x|}) avoids cosh overflow
    e = np.exp(-np.abs(x))
    sech = 2.0 * e / (1.0 + e * e)
    s = sech * sech
    t = np.tanh(x)
    if order == 0:
        return -s
    if order == 1:
        return 2.0 * s * t
    if order == 2:
        return 2.0 * s * (3.0 * s - 2.0)
    if order == 3:
        return -8.0 * s * t * (3.0 * s - 1.0)
    if order == 4:
        return -8.0 * s * (15.0 * s * s - 15.0 * s + 2.0)
    raise DomainError(f"derivative order {order} not in 0..4")


def _gaussian_derivs(x, order):
    x = np.asarray(x, dtype=float)
    e = np.exp(-x * x)
    if order == 0:
        return -e
    if order == 1:
        return 2.0 * x * e
    if order == 2:
        return (2.0 - 4.0 * x * x) * e
    if order == 3:
        return (8.0 * x ** 3 - 12.0 * x) * e
    if order == 4:
        return (-16.0 * x ** 4 + 48.0 * x * x - 12.0) * e
    raise DomainError(f"derivative order {order} not in 0..4")


SECH2 = InitialProfile("sech2", _sech2_derivs, x_min=0.0, decay_exponent=1.0)
GAUSSIAN = InitialProfile("gaussian", _gaussian_derivs, x_min=0.0,
                          decay_exponent=1.0)

_BUILTINS = {"sech2": SECH2, "gaussian": GAUSSIAN}


def get_profile(name: str) -> InitialProfile:
    """Look up a built-in profile by config name."""
    try:
        return _BUILTINS[name]
    except KeyError:
        raise DomainError(
            f"unknown profile {name!r}; built-ins: {sorted(_BUILTINS)}")


def eval_profile(p: InitialProfile, x, order: int = 0):
    """u0^(order)(x) from the profile's closed-form derivative maps."""
    if not 0 <= order <= 4:
        raise DomainError(f"derivative order {order} not in 0..4")
    return p(x, order)


def _check_side(side: str) -> str:
    if side not in ("left", "right"):
        raise DomainError(f"side must be 'left' or 'right', got {side!r}")
    return side


def invert_branch(p: InitialProfile, side: str, u: float,
                  clamp: float = DOMAIN_CLAMP) -> float:
    """Solve u0(x) = u on one monotone branch.

    Bisection narrows the bracket to width 1e-3, then Newton polishes;
    if a Newton step leaves the bracket or fails to reduce the residual
    the bracket is bisected instead, so convergence is guaranteed on
    monotone data.  Residual |u0(x) - u| <= 1e-12 on exit.
    """
    _check_side(side)
    u = float(u)
    if not (-1.0 + clamp <= u <= -clamp):
        raise DomainError(
            f"u={u} outside clamped branch domain ({-1+clamp}, {-clamp})")

    sgn = -1.0 if side == "left" else 1.0
    a = p.x_min
    # march outward until u0 has passed above u (toward 0)
    step = 1.0
    b = a + sgn * step
    for _ in range(200):
        if p(b, 0) > u:
            break
        step *= 2.0
        b = a + sgn * step
    else:
        raise NoConvergence("bracket search failed; data may not decay")
    lo, hi = (b, a) if side == "left" else (a, b)
    # h(lo) and h(hi) straddle zero: h = u0 - u
    h_lo = float(p(lo, 0)) - u

    while hi - lo > 1e-3:
        mid = 0.5 * (lo + hi)
        h_mid = float(p(mid, 0)) - u
        if (h_mid > 0) == (h_lo > 0):
            lo, h_lo = mid, h_mid
        else:
            hi = mid

    x = 0.5 * (lo + hi)
    h = float(p(x, 0)) - u
    for _ in range(100):
        if abs(h) <= 1e-13:
            return x
        d = float(p(x, 1))
        x_new = x - h / d if d != 0.0 else lo - 1.0
        if not lo <= x_new <= hi:
            x_new = 0.5 * (lo + hi)
        h_new = float(p(x_new, 0)) - u
        if abs(h_new) >= abs(h) and abs(h) <= 1e-12:
            return x
        # keep the bracket valid for the fallback bisection
        if (h_new > 0) == (h_lo > 0):
            lo, h_lo = x_new, h_new
        else:
            hi = x_new
        x, h = x_new, h_new
    if abs(h) <= 1e-12:
        return x
    raise NoConvergence(f"branch inversion stalled at residual {h:.3e}")


def branch_derivatives(p: InitialProfile, side: str, u: float,
                       max_order: int = 4) -> list:
    """Derivatives f^(j)(u), j = 1..max_order, of the branch inverse."""
    if not 1 <= max_order <= 4:
        raise DomainError(f"max_order {max_order} not in 1..4")
    x = invert_branch(p, side, u)
    g1 = float(p(x, 1))
    if abs(g1) < 1e-10:
        raise SingularDerivative(
            f"u0'({x:.6g}) = {g1:.3e}; inverse derivative is singular")
    out = [1.0 / g1]
    if max_order >= 2:
        g2 = float(p(x, 2))
        out.append(-g2 / g1 ** 3)
    if max_order >= 3:
        g3 = float(p(x, 3))
        out.append((3.0 * g2 * g2 - g1 * g3) / g1 ** 5)
    if max_order >= 4:
        g4 = float(p(x, 4))
        out.append((10.0 * g1 * g2 * g3 - g1 * g1 * g4 - 15.0 * g2 ** 3)
                   / g1 ** 7)
    return out


@dataclass(frozen=True)
class AssumptionCheck:
    name: str
    passed: bool
    margin: float
    detail: str


@dataclass(frozen=True)
class AssumptionReport:
    profile: str
    checks: tuple

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __str__(self):
        lines = [f"assumption report for {self.profile}:"]
        for c in self.checks:
            flag = "pass" if c.passed else "FAIL"
            lines.append(f"  [{flag}] {c.name}: {c.detail}")
        return "\n".join(lines)


def validate_assumptions(p: InitialProfile, half_width: float = 30.0,
                         n: int = 2001, x_far: float = 8.0,
                         far_factor: float = 12.0) -> AssumptionReport:
    """Check the admissibility conditions on a sampled grid.

    Negativity, normalization u0(x_M) = -1, critical point, convexity
    at the minimum, one-sided monotonicity, and the real-line decay
    bound |u0| <= |x|^(-3-s) for |x| >= x_far.  Failures are reported,
    never raised.
    """
    checks = []
    x = p.x_min + np.linspace(-half_width, half_width, n)
    u = np.asarray(p(x, 0), dtype=float)
    # beyond x_far the profile may underflow to -0.0; strictness is only
    # meaningful where the values are representable
    near = np.abs(x - p.x_min) <= x_far

    worst = float(np.max(u))
    neg_ok = float(np.max(u[near])) < 0.0 and worst <= 0.0
    checks.append(AssumptionCheck(
        "negativity", neg_ok, -worst,
        f"max u0 on grid = {worst:.3e}"))

    u_min = float(p(p.x_min, 0))
    err = abs(u_min + 1.0)
    checks.append(AssumptionCheck(
        "normalization", err <= 1e-12, 1e-12 - err,
        f"|u0(x_M) + 1| = {err:.3e}"))

    d1 = abs(float(p(p.x_min, 1)))
    checks.append(AssumptionCheck(
        "critical_point", d1 <= 1e-10, 1e-10 - d1,
        f"|u0'(x_M)| = {d1:.3e}"))

    d2 = float(p(p.x_min, 2))
    checks.append(AssumptionCheck(
        "convexity", d2 > 0.0, d2, f"u0''(x_M) = {d2:.6g}"))

    slope = np.asarray(p(x, 1), dtype=float)
    left = x < p.x_min - 1e-9
    right = x > p.x_min + 1e-9
    worst_l = float(np.max(slope[left])) if left.any() else -np.inf
    worst_r = float(np.min(slope[right])) if right.any() else np.inf
    mono_ok = (float(np.max(slope[left & near])) < 0.0
               and float(np.min(slope[right & near])) > 0.0
               and worst_l <= 0.0 and worst_r >= 0.0)
    checks.append(AssumptionCheck(
        "monotone_branches", mono_ok, min(-worst_l, worst_r),
        f"max u0' left = {worst_l:.3e}, min u0' right = {worst_r:.3e}"))

    x_f = p.x_min + np.concatenate([-np.geomspace(x_far, far_factor * x_far, 40),
                                    np.geomspace(x_far, far_factor * x_far, 40)])
    bound = np.abs(x_f - p.x_min) ** (-3.0 - p.decay_exponent)
    ratio = np.abs(np.asarray(p(x_f, 0), dtype=float)) / bound
    worst_ratio = float(np.max(ratio))
    checks.append(AssumptionCheck(
        "far_field_decay", worst_ratio <= 1.0, 1.0 - worst_ratio,
        f"max |u0| / |x - x_M|^(-3-s) = {worst_ratio:.3e}"))

    return AssumptionReport(p.name, tuple(checks))
