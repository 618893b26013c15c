"""Pole-free Painleve-type profile: BVP solve, identities, frozen values.

Frozen oracles below were produced at L=120, N=6001, tol=1e-12 and
cross-checked against independent runs at N=12001 (grid error enters in
the 7th digit).  The T-derivative fields are closed forms in U and its
X-derivatives; they are validated here against central T-differences of
independent solves, and the antiderivative identity Q_X = U against a
4th-order X-difference of Q, with tolerances set by the measured
discretization floor of each comparison.
"""

import numpy as np
import pytest

from kdvh import (
    BoundaryMismatch,
    DomainError,
    ode_residual,
    q_field,
    solve_p12,
)
from kdvh.painleve import (
    asymptotic_slope,
    asymptotic_value,
    boundary_budget,
    fd_weights,
    q_asymptotic,
)

# frozen point values of U(X, T) at L=120, N=6001
U_AT = {
    (0.0, 0.0): -0.41518065730547365,
    (5.0, 0.0): -3.106112843643921,
    (0.0, 1.0): -0.46691964418512094,
    (0.0, -1.0): -0.03487087957438518,
    (0.0, 0.5): -0.8725458422953556,
}

# local extrema of U(X, 0) on X in [-3.2, 0]: the profile oscillates
# around the outer branch -cbrt(6X), so U_X changes sign repeatedly
EXTREMA = [(-2.60, 2.482805), (-2.36, 2.497424),
           (-1.44, 1.857938), (-0.92, 2.260904)]


def test_fd_weights_exact_on_polynomials():
    w = fd_weights([-2, -1, 0, 1, 2], 2)
    np.testing.assert_allclose(w, [-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12],
                               atol=1e-12)
    w1 = fd_weights([-1, 0, 1], 1)
    np.testing.assert_allclose(w1, [-0.5, 0.0, 0.5], atol=1e-13)


def test_asymptotic_value_and_slope():
    # leading branch with the T-correction, odd in X at leading order
    assert abs(asymptotic_value(100.0, 0.0) + (600.0) ** (1 / 3)) <= 1e-12
    assert abs(asymptotic_value(-100.0, 0.0) - (600.0) ** (1 / 3)) <= 1e-12
    # T-correction: compare against a T-difference
    d = 1e-5
    fd = (asymptotic_value(50.0, d) - asymptotic_value(50.0, -d)) / (2 * d)
    assert abs(fd + 6.0 ** (2 / 3) / 3.0 * 50.0 ** (-1 / 3)) <= 1e-9
    # slope matches the X-derivative of the value
    fd = (asymptotic_value(50.0 + d, 0.3)
          - asymptotic_value(50.0 - d, 0.3)) / (2 * d)
    assert abs(fd - asymptotic_slope(50.0, 0.3)) <= 1e-9
    with pytest.raises(DomainError):
        asymptotic_value(0.0, 0.0)


def test_solve_rejects_bad_arguments():
    with pytest.raises(DomainError):
        solve_p12(0.0, L=20.0)
    with pytest.raises(DomainError):
        solve_p12(0.0, N=500)
    with pytest.raises(DomainError):
        solve_p12(6.0)
    with pytest.raises(DomainError):
        solve_p12(0.0, dT=0.5)


@pytest.mark.parametrize("X,T", sorted(U_AT))
def test_frozen_point_values(X, T):
    f = solve_p12(T)
    j = int(np.argmin(np.abs(f.X - X)))
    assert abs(f.X[j] - X) <= 1e-12
    assert abs(f.U[j] - U_AT[(X, T)]) <= 1e-8


@pytest.mark.parametrize("T", [-1.0, 0.0, 1.0])
def test_ode_residual_small(T):
    f = solve_p12(T)
    assert f.newton_residual <= 1e-10
    assert ode_residual(f) <= 1e-10


def test_profile_is_not_odd():
    # genuine asymmetry: the even part decays like (1/18) X^-2 but is
    # O(1) in the oscillation zone
    f = solve_p12(0.0)
    mask = np.abs(f.X) <= 60.0
    sym = (f.U + f.U[::-1])[mask]
    peak = float(np.max(np.abs(sym)))
    assert 0.82 <= peak <= 0.84
    # even tail: 18 X^2 (U(X) + U(-X)) -> 1
    for Xt in (30.0, 60.0):
        j = int(np.argmin(np.abs(f.X - Xt)))
        s = f.U[j] + f.U[f.N - 1 - j]
        assert abs(18.0 * Xt * Xt * s - 1.0) <= 1e-3


def test_oscillation_extrema():
    # U(X, 0) is non-monotone: frozen interior extrema on [-3.2, 0]
    f = solve_p12(0.0)
    m = (f.X >= -3.2) & (f.X <= 0.0)
    Xs, Us = f.X[m], f.U[m]
    sgn = np.sign(np.diff(Us))
    flips = np.where(sgn[1:] * sgn[:-1] < 0)[0] + 1
    found = [(float(Xs[j]), float(Us[j])) for j in flips]
    assert len(found) == len(EXTREMA)
    for (xg, ug), (xf, uf) in zip(found, EXTREMA):
        assert abs(xg - xf) <= 0.05
        assert abs(ug - uf) <= 1e-3


def test_boundary_matches_far_field():
    f = solve_p12(0.0)
    for sgn in (-1.0, 1.0):
        Xq = sgn * 0.95 * f.L
        j = int(np.argmin(np.abs(f.X - Xq)))
        dev = abs(f.U[j] - asymptotic_value(f.X[j], 0.0))
        assert dev <= boundary_budget(f.X[j], 0.0)


def test_time_derivative_fields_match_t_differences():
    d = 0.01
    f0 = solve_p12(0.0)
    fp = solve_p12(+d)
    fm = solve_p12(-d)
    inner = np.abs(f0.X) <= 0.9 * f0.L
    fd_U = (fp.U - fm.U) / (2 * d)
    assert float(np.max(np.abs((fd_U - f0.U_T)[inner]))) <= 2e-3
    fd_Q = (fp.Q - fm.Q) / (2 * d)
    assert float(np.max(np.abs((fd_Q - f0.Q_T)[inner]))) <= 2e-3
    fd_UXX = (fp.U_XX - fm.U_XX) / (2 * d)
    assert float(np.max(np.abs((fd_UXX - f0.U_XXT)[inner]))) <= 5e-2


def test_q_is_antiderivative_of_u():
    f = solve_p12(0.0)
    h = f.X[1] - f.X[0]
    Q = f.Q
    QX = (Q[:-4] - 8.0 * Q[1:-3] + 8.0 * Q[3:-1] - Q[4:]) / (12.0 * h)
    inner = np.abs(f.X[2:-2]) <= 0.9 * f.L
    dev = float(np.max(np.abs(QX[inner] - f.U[2:-2][inner])))
    assert dev <= 2e-3
    np.testing.assert_allclose(q_field(f), f.Q, rtol=0, atol=1e-12)


def test_q_far_field():
    f = solve_p12(0.3)
    for Xe in (-110.0, 110.0):
        j = int(np.argmin(np.abs(f.X - Xe)))
        assert abs(f.Q[j] - q_asymptotic(Xe, 0.3)) <= 5e-3


def test_field_cache_returns_same_object():
    f1 = solve_p12(0.25)
    f2 = solve_p12(0.25)
    assert f1 is f2
    # a different tolerance is a different problem
    f3 = solve_p12(0.25, tol=1e-11)
    assert f3 is not f1


def test_continuation_path_consistency():
    # reaching T=0.5 in one leg or two must agree far beyond the
    # continuation tolerance
    fa = solve_p12(0.5, dT=0.25)
    fb = solve_p12(0.5, dT=0.13)
    assert float(np.max(np.abs(fa.U - fb.U))) <= 1e-9
