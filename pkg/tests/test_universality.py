"""Double-scaling window: constants algebra, coordinate map, expansion.

The window constants follow from the breakup data (u_c, x_c, t_c, k,
F4) through fixed powers of 8k; their internal relations (a1 = 2 a2^2,
the slope factor in a4, epsilon-independence of c3 at fixed T) are
asserted to near round-off.  For the sech^2 profile at m=1 the slope
constant is exactly a3 = 6 u_c = -4.
"""

import numpy as np
import pytest

from kdvh import (
    DomainError,
    OutOfWindow,
    SECH2,
    catastrophe,
    constants,
    predict,
    scaling_study,
    solve_p12,
    window_map,
)


def _consts(m=1):
    return constants(catastrophe(SECH2, m), m)


def test_constant_formulas():
    c = _consts()
    ek = 8.0 * c.k
    assert abs(c.a1 - 2.0 / ek ** (2.0 / 7.0)) <= 1e-15
    assert abs(c.a2 - 1.0 / ek ** (1.0 / 7.0)) <= 1e-15
    assert abs(c.a4 - 12.0 / ek ** (3.0 / 7.0)) <= 1e-15
    # internal relation independent of k's value
    assert abs(c.a1 - 2.0 * c.a2 ** 2) <= 1e-13


def test_slope_constant_closed_form():
    # a3 = C_1 u_c = 6 (-2/3) = -4 for the sech^2 profile at m=1
    assert abs(_consts().a3 + 4.0) <= 1e-10
    c2 = _consts(2)
    assert abs(c2.a3 - (-30.0) * (-0.8) ** 2) <= 1e-9


@pytest.mark.parametrize("m", [1, 2])
def test_window_map_inverts(m):
    c = _consts(m)
    from kdvh import coefficient
    slope = 2.0 * m * coefficient(m) * c.u_c ** (m - 1)
    for X, T, eps in [(0.7, -1.0, 0.1), (-2.0, 1.0, 0.05), (0.0, 0.0, 0.02)]:
        ws = window_map(X, T, eps, c)
        T_back = (ws.t - c.t_c) * slope / ((8 * c.k) ** (3 / 7) * eps ** (4 / 7))
        X_back = (ws.x - c.x_c - c.a3 * (ws.t - c.t_c)) \
            / ((8 * c.k) ** (1 / 7) * eps ** (6 / 7))
        assert abs(T_back - T) <= 1e-12
        assert abs(X_back - X) <= 1e-12
        assert ws.c2 == X


def test_window_center_at_breakup():
    # X = T = 0 maps to the breakup point for every eps
    c = _consts()
    for eps in (0.1, 0.01):
        ws = window_map(0.0, 0.0, eps, c)
        assert abs(ws.t - c.t_c) <= 1e-15
        assert abs(ws.x - c.x_c) <= 1e-15
        assert ws.c3 == 0.0


def test_c1_formula_and_c3_eps_independence():
    c = _consts()
    ws = window_map(0.3, 1.0, 0.1, c)
    assert abs(ws.c1 - 32.0 * c.F4 / (63.0 * (8 * c.k) ** (11 / 7))) <= 1e-15
    c3s = [window_map(0.3, 1.0, eps, c).c3 for eps in (0.1, 0.05, 0.035)]
    assert abs(c3s[0] - c3s[1]) <= 1e-12 * abs(c3s[0])
    assert abs(c3s[0] - c3s[2]) <= 1e-12 * abs(c3s[0])
    # c3 is linear in T
    c3_2T = window_map(0.3, 2.0, 0.1, c).c3
    assert abs(c3_2T - 2.0 * c3s[0]) <= 1e-12 * abs(c3_2T)


def test_window_map_rejects_bad_eps():
    with pytest.raises(DomainError):
        window_map(0.0, 0.0, -0.1, _consts())


def test_predict_validation():
    c = _consts()
    pf = solve_p12(0.0)
    ws = window_map(0.5, 0.0, 0.1, c)
    with pytest.raises(DomainError):
        predict(ws, pf, order="resummed")
    # sample T must match the solved field
    ws_wrong = window_map(0.5, 1.0, 0.1, c)
    with pytest.raises(DomainError):
        predict(ws_wrong, pf)
    far = window_map(0.9 * pf.L, 0.0, 0.1, c)
    with pytest.raises(OutOfWindow):
        predict(far, pf)


def test_predict_orders_differ_at_next_power():
    # leading vs corrected differ by O(eps^(4/7)) with an O(1) prefactor
    c = _consts()
    pf = solve_p12(0.0)
    gaps = []
    for eps in (0.1, 0.01):
        ws = window_map(0.5, 0.0, eps, c)
        gaps.append(abs(predict(ws, pf, "corrected")
                        - predict(ws, pf, "leading")))
    ratio = gaps[0] / gaps[1]
    expect = (0.1 / 0.01) ** (4.0 / 7.0)
    assert abs(np.log(ratio) - np.log(expect)) <= 0.02


def test_scaling_study_rejects_bad_ladder():
    with pytest.raises(DomainError):
        scaling_study(SECH2, 1, [0.05, 0.1], [(0.0, 0.0)])


def test_scaling_study_smoke():
    # structural check on a tiny ladder; physics tolerances live in the
    # acceptance suite
    rep = scaling_study(SECH2, 1, [0.1, 0.07], [(0.0, -1.0), (1.0, -1.0)],
                        Lx=60.0, N=2 ** 14)
    d = rep.to_dict()
    assert d["profile"] == "sech2" and d["m"] == 1
    assert d["window_T"] == [-1.0] and d["window_X"] == [0.0, 1.0]
    assert len(d["samples"]) == 4
    for key in ("0.1", "0.07"):
        assert d["E_lead"][key] > 0.0
        assert d["E_corr"][key] > 0.0
        assert d["prebreak_errors"][key] > 0.0
    assert isinstance(d["slope_lead"], float)
    assert isinstance(d["slope_prebreak"], float)
    assert d["prebreak_point"][1] == pytest.approx(0.7 * d["constants"]["t_c"])
    # window samples sit before the breakup line for T < 0
    for s in d["samples"]:
        assert s["t"] < d["constants"]["t_c"]


def test_scaling_study_prebreak_only():
    rep = scaling_study(SECH2, 1, [0.1, 0.07], [], Lx=60.0, N=2 ** 14)
    assert rep.E_lead == {} and rep.E_corr == {}
    assert rep.slope_lead is None and rep.slope_corr is None
    assert len(rep.prebreak_errors) == 2
    assert rep.slope_prebreak is not None
