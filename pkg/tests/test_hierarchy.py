"""Hierarchy right-hand sides against exact traveling-wave cancellation.

u(x,t) = 2 eps^2 kap^2 sech^2(kap (x - v t)) solves the m-th flow with
v = -(-4 eps^2 kap^2)^m, so rhs(u0) + v u0_x vanishes identically.  The
check is purely algebraic (no time stepping) and pins every hardcoded
coefficient at once: a single wrong prefactor leaves an O(1) residual.
The numeric residual floor is round-off amplified by the highest
derivative, eps^(2m) k^(2m+1) * 1e-16, so the strict assertion lives on
the low band |k| <= 12 where that floor stays below 1e-9.
"""

import numpy as np
import pytest

from kdvh import DomainError, FlowParams, UnsupportedFlow, coefficient, conserved, rhs
from kdvh.hierarchy import linear_symbol, nonlinear_terms
from kdvh.spectral import FourierGrid


def test_coefficient_values():
    assert coefficient(1) == 6.0
    assert coefficient(2) == -30.0
    assert coefficient(3) == 140.0


def test_coefficient_recurrence():
    # C_{m+1}/C_m = -2 (2m+3)/(m+1) follows from the closed form
    for m in range(1, 8):
        ratio = coefficient(m + 1) / coefficient(m)
        assert abs(ratio + 2.0 * (2 * m + 3) / (m + 1)) <= 1e-13


def test_coefficient_rejects_bad_index():
    with pytest.raises(DomainError):
        coefficient(0)
    with pytest.raises(DomainError):
        coefficient(-2)


def test_flow_params_validation():
    fp = FlowParams(2, 0.1)
    assert fp.C_m == -30.0
    with pytest.raises(DomainError):
        FlowParams(0, 0.1)
    with pytest.raises(DomainError):
        FlowParams(1, -0.5)


def test_unsupported_flow():
    grid = FourierGrid(30.0, 256)
    u = np.exp(-grid.x ** 2)
    for m in (4, 5):
        with pytest.raises(UnsupportedFlow):
            rhs(u, grid, 0.1, m)
    with pytest.raises(UnsupportedFlow):
        linear_symbol(grid, 0.1, 4)


def _soliton_residual(m, eps=0.7, kappa=1.0, Lx=30.0, N=4096):
    grid = FourierGrid(Lx, N)
    u0 = 2.0 * eps ** 2 * kappa ** 2 / np.cosh(kappa * grid.x) ** 2
    v = -((-4.0 * eps ** 2 * kappa ** 2) ** m)
    u0_x = grid.deriv(u0)
    r = rhs(u0, grid, eps, m) + v * u0_x
    r_hat = grid.to_hat(r)
    low = np.where(grid.k <= 12.0, 1.0, 0.0)
    r_low = float(np.max(np.abs(grid.to_phys(r_hat * low))))
    r_raw = float(np.max(np.abs(r)))
    k_cut = (2.0 / 3.0) * grid.k[-1]
    budget = eps ** (2 * m) * k_cut ** (2 * m + 1) * 3e-15
    return r_low, r_raw, budget


@pytest.mark.parametrize("m", [1, 2, 3])
def test_traveling_wave_identity(m):
    r_low, r_raw, budget = _soliton_residual(m)
    assert r_low <= 1e-9, f"m={m}: low-band residual {r_low:.3e}"
    assert r_raw <= budget, (
        f"m={m}: raw residual {r_raw:.3e} above round-off budget {budget:.3e}")


@pytest.mark.parametrize("m", [1, 2, 3])
def test_traveling_wave_identity_second_speed(m):
    # different kap and eps exercise every eps power independently
    r_low, _, _ = _soliton_residual(m, eps=0.45, kappa=1.4)
    assert r_low <= 1e-9


@pytest.mark.parametrize("m", [1, 2, 3])
def test_nonlinear_terms_conserve_mass_mode(m):
    # every rhs is a perfect x-derivative: the k=0 mode must vanish
    rng = np.random.default_rng(3)
    grid = FourierGrid(20.0, 1024)
    u_hat = np.zeros(grid.N // 2 + 1, dtype=complex)
    nlow = 24
    u_hat[1:nlow] = (rng.standard_normal(nlow - 1)
                     + 1j * rng.standard_normal(nlow - 1))
    u_hat[0] = 0.7 * grid.N  # nonzero mean must stay conserved too
    n_hat = nonlinear_terms(u_hat, grid, 0.3, m)
    scale = float(np.max(np.abs(n_hat))) + 1e-30
    assert abs(n_hat[0]) <= 1e-12 * scale


@pytest.mark.parametrize("m", [1, 2, 3])
def test_linear_symbol_is_imaginary(m):
    grid = FourierGrid(15.0, 512)
    sym = linear_symbol(grid, 0.2, m)
    assert np.all(sym.real == 0.0)
    k = grid.k
    np.testing.assert_allclose(sym.imag, 0.2 ** (2 * m) * k ** (2 * m + 1),
                               rtol=1e-13)


def test_conserved_quadrature():
    grid = FourierGrid(np.pi, 256)
    u = np.cos(grid.x) ** 2
    mass, h0 = conserved(u, grid.dx)
    # integrals over one period of length 2 pi
    assert abs(mass - np.pi) <= 1e-12
    assert abs(h0 - 0.5 * (3.0 * np.pi / 4.0)) <= 1e-12
