"""Critical-window expansion at the gradient catastrophe.

Near the generic breakup point (x_c, t_c) of the m-th flow, the small-eps
solution is described in the double-scaling coordinates

    t = t_c + (8k)^(3/7) eps^(4/7) T / (2 m C_m u_c^(m-1))
    x = x_c + a3 (t - t_c) + (8k)^(1/7) eps^(6/7) X

by the pole-free Painleve profile U(X, T) and its derived fields:

    u = u_c + a1 eps^(2/7) U
        + c1 eps^(4/7) (Q U_X + U_XX + 4 U^2 - 3 c2 U_T)
        + c3 eps^(4/7) (2 U_X Q_T + 4 U U_T + U_XXT / 2)
        + O(eps^(5/7))

with constants determined solely by k = -F'''(u_c), F4 = F''''(u_c) and
the flow:

    a1 = 2/(8k)^(2/7)        a2 = 1/(8k)^(1/7)
    a3 = C_m u_c^m           a4 = 2 m C_m u_c^(m-1) / (8k)^(3/7)
    c1 = 32 F4 / (63 (8k)^(11/7))
    c2 = X
    c3 = (m C_m u_c^(m-1) (t - t_c) / (4 k eps^(4/7)))
         (2(m-1)/(5 u_c) + 2 F4/(21 k))

c3 is eps-free at fixed T because t - t_c carries eps^(4/7).  The
scaling study measures max-norm errors of the truncations against the
direct spectral solution over an (X, T) grid and fits their eps-slopes
(4/7 expected for the leading truncation, at least 5/7 after the
corrections), plus the quadratic eps-rate at a fixed point away from
the catastrophe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from . import hodograph, spectral
from .errors import DomainError, OutOfWindow
from .hodograph import CatastrophePoint
from .painleve import PainleveField, solve_p12
from .profiles import InitialProfile

#: everything within 0.8 L of the Painleve boundary counts as clean
WINDOW_FRACTION = 0.8


@dataclass(frozen=True)
class UniversalityConstants:
    a1: float
    a2: float
    a3: float
    a4: float
    k: float
    F4: float
    u_c: float
    x_c: float
    t_c: float
    m: int


def constants(cp: CatastrophePoint, m: int) -> UniversalityConstants:
    """Closed-form window constants from the breakup data."""
    if cp.k <= 0:
        raise DomainError(f"genericity constant k={cp.k} must be positive")
    ek = (8.0 * cp.k)
    C_m = hodograph.coefficient(m)
    return UniversalityConstants(
        a1=2.0 / ek ** (2.0 / 7.0),
        a2=1.0 / ek ** (1.0 / 7.0),
        a3=C_m * cp.u_c ** m,
        a4=2.0 * m * C_m * cp.u_c ** (m - 1) / ek ** (3.0 / 7.0),
        k=cp.k, F4=cp.F4, u_c=cp.u_c, x_c=cp.x_c, t_c=cp.t_c, m=m)


@dataclass(frozen=True)
class WindowSample:
    """One double-scaling sample: Painleve coordinates and physical ones."""
    X: float
    T: float
    x: float
    t: float
    eps: float
    c1: float
    c2: float
    c3: float
    c: UniversalityConstants


def window_map(X: float, T: float, eps: float,
               c: UniversalityConstants) -> WindowSample:
    """Invert the double-scaling coordinates at fixed eps."""
    if eps <= 0:
        raise DomainError(f"eps={eps} must be positive")
    ek = 8.0 * c.k
    C_m = hodograph.coefficient(c.m)
    slope = 2.0 * c.m * C_m * c.u_c ** (c.m - 1)
    t = c.t_c + ek ** (3.0 / 7.0) * eps ** (4.0 / 7.0) * T / slope
    x = c.x_c + c.a3 * (t - c.t_c) + ek ** (1.0 / 7.0) * eps ** (6.0 / 7.0) * X
    c1 = 32.0 * c.F4 / (63.0 * ek ** (11.0 / 7.0))
    c3 = (c.m * C_m * c.u_c ** (c.m - 1) * (t - c.t_c)
          / (4.0 * c.k * eps ** (4.0 / 7.0))) \
        * (2.0 * (c.m - 1) / (5.0 * c.u_c) + 2.0 * c.F4 / (21.0 * c.k))
    return WindowSample(float(X), float(T), float(x), float(t), float(eps),
                        float(c1), float(X), float(c3), c)


def _interpolators(pf: PainleveField):
    return {name: CubicSpline(pf.X, getattr(pf, name))
            for name in ("U", "U_X", "U_XX", "U_T", "U_XXT", "Q", "Q_T")}


def predict(ws: WindowSample, pf: PainleveField, order: str = "corrected",
            _interp=None) -> float:
    """Evaluate the truncated expansion at one window sample.

    order 'leading' keeps u_c + a1 eps^(2/7) U; 'corrected' adds both
    eps^(4/7) groups.  Fields are cubic-interpolated on the Painleve
    grid at X = ws.X.
    """
    if order not in ("leading", "corrected"):
        raise DomainError(f"order must be 'leading' or 'corrected': {order}")
    if abs(ws.T - pf.T) > 1e-12:
        raise DomainError(f"field solved at T={pf.T}, sample at T={ws.T}")
    if abs(ws.X) > WINDOW_FRACTION * pf.L:
        raise OutOfWindow(
            f"|X|={abs(ws.X)} beyond {WINDOW_FRACTION:g} L = "
            f"{WINDOW_FRACTION * pf.L:g}")
    itp = _interp if _interp is not None else _interpolators(pf)
    c = ws.c
    e27 = ws.eps ** (2.0 / 7.0)
    U = float(itp["U"](ws.X))
    val = c.u_c + c.a1 * e27 * U
    if order == "leading":
        return val
    e47 = e27 * e27
    U_X = float(itp["U_X"](ws.X))
    U_XX = float(itp["U_XX"](ws.X))
    U_T = float(itp["U_T"](ws.X))
    U_XXT = float(itp["U_XXT"](ws.X))
    Q = float(itp["Q"](ws.X))
    Q_T = float(itp["Q_T"](ws.X))
    val += ws.c1 * e47 * (Q * U_X + U_XX + 4.0 * U * U - 3.0 * ws.c2 * U_T)
    val += ws.c3 * e47 * (2.0 * U_X * Q_T + 4.0 * U * U_T + 0.5 * U_XXT)
    return val


@dataclass
class ScalingReport:
    """Everything a scaling study measured, ready for JSON."""
    profile: str
    m: int
    constants: dict
    eps_ladder: list
    window_T: list
    window_X: list
    samples: list = field(default_factory=list)
    E_lead: dict = field(default_factory=dict)
    E_corr: dict = field(default_factory=dict)
    slope_lead: float | None = None
    slope_corr: float | None = None
    prebreak_point: tuple | None = None
    prebreak_errors: dict = field(default_factory=dict)
    slope_prebreak: float | None = None

    def to_dict(self) -> dict:
        return {
            "profile": self.profile,
            "m": self.m,
            "constants": self.constants,
            "eps_ladder": list(self.eps_ladder),
            "window_T": list(self.window_T),
            "window_X": list(self.window_X),
            "samples": self.samples,
            "E_lead": self.E_lead,
            "E_corr": self.E_corr,
            "slope_lead": self.slope_lead,
            "slope_corr": self.slope_corr,
            "prebreak_point": self.prebreak_point,
            "prebreak_errors": self.prebreak_errors,
            "slope_prebreak": self.slope_prebreak,
        }


def _fit_slope(eps_values, errors) -> float | None:
    pts = [(e, err) for e, err in zip(eps_values, errors)
           if err > 0 and np.isfinite(err)]
    if len(pts) < 2:
        return None
    le = np.log([p[0] for p in pts])
    lv = np.log([p[1] for p in pts])
    return float(np.polyfit(le, lv, 1)[0])


def scaling_study(p: InitialProfile, m: int, eps_ladder: Sequence[float],
                  XT_grid: Sequence[tuple], *, Lx: float = 60.0,
                  N: int = 2 ** 14, painleve_L: float = 120.0,
                  painleve_N: int = 6001) -> ScalingReport:
    """Measure the window expansion and the pre-breakup quadratic rate.

    For each eps one spectral evolution visits, in order, the fixed
    pre-breakup time 0.7 t_c and every window time t(T, eps); u is
    sampled by band-limited interpolation at the mapped x positions.
    An empty XT_grid skips the window study (no Painleve solves).
    """
    eps_ladder = [float(e) for e in eps_ladder]
    if any(e2 >= e1 for e1, e2 in zip(eps_ladder, eps_ladder[1:])):
        raise DomainError("eps ladder must be strictly descending")
    cp = hodograph.catastrophe(p, m)
    c = constants(cp, m)
    Ts = sorted({float(T) for _, T in XT_grid})
    Xs = sorted({float(X) for X, _ in XT_grid})
    report = ScalingReport(
        profile=p.name, m=m,
        constants={"a1": c.a1, "a2": c.a2, "a3": c.a3, "a4": c.a4,
                   "k": c.k, "F4": c.F4, "u_c": c.u_c, "x_c": c.x_c,
                   "t_c": c.t_c},
        eps_ladder=eps_ladder, window_T=Ts, window_X=Xs)

    fields = {}
    interps = {}
    for T in Ts:
        fields[T] = solve_p12(T, L=painleve_L, N=painleve_N)
        interps[T] = _interpolators(fields[T])

    x_pre = cp.x_c - 0.5
    t_pre = 0.7 * cp.t_c
    u_hodo = hodograph.solve_u(x_pre, t_pre, p, m).u
    report.prebreak_point = (x_pre, t_pre)

    for eps in eps_ladder:
        samples = {T: window_map(0.0, T, eps, c) for T in Ts}
        times = [(t_pre, None)] + [(samples[T].t, T) for T in Ts]
        times.sort(key=lambda item: item[0])
        state = spectral.init_state(p, eps, m, Lx=Lx, N=N)
        e_lead = 0.0
        e_corr = 0.0
        for t_snap, T in times:
            state = spectral.evolve(state, t_snap)
            if T is None:
                u_eps = spectral.sample(state, x_pre)
                report.prebreak_errors[repr(eps)] = abs(u_eps - u_hodo)
                continue
            for X in Xs:
                ws = window_map(X, T, eps, c)
                u_num = spectral.sample(state, ws.x)
                u_lead = predict(ws, fields[T], "leading", _interp=interps[T])
                u_corr = predict(ws, fields[T], "corrected",
                                 _interp=interps[T])
                report.samples.append({
                    "eps": eps, "X": X, "T": T, "x": ws.x, "t": ws.t,
                    "u_num": u_num, "u_lead": u_lead, "u_corr": u_corr})
                e_lead = max(e_lead, abs(u_num - u_lead))
                e_corr = max(e_corr, abs(u_num - u_corr))
        if Ts:
            report.E_lead[repr(eps)] = e_lead
            report.E_corr[repr(eps)] = e_corr

    if Ts:
        report.slope_lead = _fit_slope(
            eps_ladder, [report.E_lead[repr(e)] for e in eps_ladder])
        report.slope_corr = _fit_slope(
            eps_ladder, [report.E_corr[repr(e)] for e in eps_ladder])
    report.slope_prebreak = _fit_slope(
        eps_ladder, [report.prebreak_errors[repr(e)] for e in eps_ladder])
    return report
