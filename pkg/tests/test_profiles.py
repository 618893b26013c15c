"""Initial-profile closed forms, branch inversion, and admissibility checks.

Frozen oracles: derivative values are cross-checked against high-order
central finite differences at random points, and the branch-inverse
derivative formulas against divided differences of invert_branch itself.
"""

import numpy as np
import pytest

from kdvh import (
    DomainError,
    branch_derivatives,
    eval_profile,
    get_profile,
    invert_branch,
    validate_assumptions,
)

SECH2 = get_profile("sech2")
GAUSSIAN = get_profile("gaussian")


def test_builtin_lookup():
    assert SECH2.name == "sech2"
    assert GAUSSIAN.name == "gaussian"
    with pytest.raises(DomainError):
        get_profile("box")


def test_sech2_values():
    x = np.array([-2.0, -0.5, 0.0, 0.5, 2.0])
    np.testing.assert_allclose(eval_profile(SECH2, x),
                               -1.0 / np.cosh(x) ** 2, rtol=1e-14)
    assert eval_profile(SECH2, 0.0) == -1.0


def test_gaussian_values():
    x = np.array([-2.0, -0.5, 0.0, 0.5, 2.0])
    np.testing.assert_allclose(eval_profile(GAUSSIAN, x),
                               -np.exp(-x ** 2), rtol=1e-14)
    assert eval_profile(GAUSSIAN, 0.0) == -1.0


@pytest.mark.parametrize("profile", [SECH2, GAUSSIAN])
@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_derivatives_match_finite_differences(profile, order):
    # 4th-order central differences of the (order-1)-th derivative
    rng = np.random.default_rng(7)
    x = rng.uniform(-2.5, 2.5, size=20)
    h = 1e-3
    lower = eval_profile(profile, x[None, :] + h * np.array(
        [-2.0, -1.0, 1.0, 2.0])[:, None], order - 1)
    fd = (lower[0] - 8.0 * lower[1] + 8.0 * lower[2] - lower[3]) / (12.0 * h)
    np.testing.assert_allclose(eval_profile(profile, x, order), fd,
                               rtol=0, atol=5e-10)


def test_derivative_order_bounds():
    with pytest.raises(DomainError):
        eval_profile(SECH2, 0.0, 5)
    with pytest.raises(DomainError):
        eval_profile(SECH2, 0.0, -1)


@pytest.mark.parametrize("profile", [SECH2, GAUSSIAN])
@pytest.mark.parametrize("side", ["left", "right"])
def test_invert_branch_roundtrip(profile, side):
    rng = np.random.default_rng(11)
    for u in rng.uniform(-0.999, -1e-6, size=40):
        x = invert_branch(profile, side, u)
        assert abs(eval_profile(profile, x) - u) <= 1e-12
        if side == "left":
            assert x <= profile.x_min
        else:
            assert x >= profile.x_min


def test_invert_branch_rejects_out_of_range():
    with pytest.raises(DomainError):
        invert_branch(SECH2, "left", 0.5)
    with pytest.raises(DomainError):
        invert_branch(SECH2, "left", -1.5)
    with pytest.raises(DomainError):
        invert_branch(SECH2, "up", -0.5)


def test_sech2_branch_closed_form():
    # u0(x) = -sech^2 x inverts to x = -+ arcosh(1/sqrt(-u))
    for u in (-0.9, -0.5, -0.1):
        x_exact = float(np.arccosh(1.0 / np.sqrt(-u)))
        assert abs(invert_branch(SECH2, "right", u) - x_exact) <= 1e-11
        assert abs(invert_branch(SECH2, "left", u) + x_exact) <= 1e-11


def test_gaussian_branch_closed_form():
    # u0(x) = -exp(-x^2) inverts to x = -+ sqrt(log(-1/u))
    for u in (-0.9, -0.5, -0.1):
        x_exact = float(np.sqrt(np.log(-1.0 / u)))
        assert abs(invert_branch(GAUSSIAN, "right", u) - x_exact) <= 1e-11
        assert abs(invert_branch(GAUSSIAN, "left", u) + x_exact) <= 1e-11


@pytest.mark.parametrize("profile", [SECH2, GAUSSIAN])
@pytest.mark.parametrize("side", ["left", "right"])
def test_branch_derivatives_match_divided_differences(profile, side):
    u = -0.55
    f = branch_derivatives(profile, side, u, max_order=4)
    h = 1e-3
    vals = [invert_branch(profile, side, u + j * h) for j in (-2, -1, 0, 1, 2)]
    fd1 = (vals[0] - 8 * vals[1] + 8 * vals[3] - vals[4]) / (12 * h)
    fd2 = (-vals[0] + 16 * vals[1] - 30 * vals[2]
           + 16 * vals[3] - vals[4]) / (12 * h * h)
    fd3 = (-vals[0] + 2 * vals[1] - 2 * vals[3] + vals[4]) / (2 * h ** 3)
    assert abs(f[0] - fd1) <= 1e-7 * max(1.0, abs(fd1))
    assert abs(f[1] - fd2) <= 1e-5 * max(1.0, abs(fd2))
    assert abs(f[2] - fd3) <= 1e-3 * max(1.0, abs(fd3))


def test_branch_derivatives_chain_identity():
    # f'(u0(x)) u0'(x) = 1 on both branches
    for side in ("left", "right"):
        u = -0.3
        x = invert_branch(SECH2, side, u)
        f1 = branch_derivatives(SECH2, side, u, max_order=1)[0]
        assert abs(f1 * eval_profile(SECH2, x, 1) - 1.0) <= 1e-12


def test_branch_rejects_clamped_neighborhood_of_minimum():
    # u0' vanishes at the minimum; the clamp guard rejects u there before
    # the inverse derivative can blow up
    with pytest.raises(DomainError):
        branch_derivatives(SECH2, "left", -1.0 + 1e-14)
    with pytest.raises(DomainError):
        invert_branch(SECH2, "right", -1e-12)


@pytest.mark.parametrize("profile", [SECH2, GAUSSIAN])
def test_validate_assumptions_passes(profile):
    report = validate_assumptions(profile)
    assert report.all_passed, str(report)
    names = {c.name for c in report.checks}
    assert {"negativity", "normalization", "critical_point", "convexity",
            "monotone_branches", "far_field_decay"} <= names
