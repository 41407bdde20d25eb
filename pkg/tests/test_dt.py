from fractions import Fraction

import pytest

from qstrip.dt import (
    DTFactor,
    DTFactorization,
    branch_residual,
    classical_dt,
    classical_y_branch,
    greedy_decompose,
    product_decompose,
    refactor_check,
    roundtrip_ok,
)
from qstrip.errors import NonUnitConstant, NotInvertible
from qstrip.geometry import StripGeometry
from qstrip.quantization import Basepoint, closed_form_psi
from qstrip.series import QLaurent, XSeries, euler_series

t = QLaurent.t()


def test_euler_series_factors():
    # 1/(tX;q)_inf = prod_k (1 - t^(2k+1) X)^(-1)
    coeffs = euler_series(t, 5, 14)
    psi = XSeries(coeffs)
    fac = product_decompose(psi, 5)
    assert all(f.d == 1 for f in fac.factors)
    assert sorted(f.s for f in fac.factors) == [1, 3, 5, 7, 9, 11, 13][: len(fac.factors)]
    assert all(f.e == -1 for f in fac.factors)


def test_single_factor():
    # 1 - X t^2 m
    a1 = QLaurent.param("a1")
    psi = XSeries([QLaurent.one(), -(a1 * t * t), QLaurent.zero(), QLaurent.zero()])
    fac = product_decompose(psi)
    assert len(fac.factors) == 1
    f = fac.factors[0]
    assert (f.d, f.s, f.e) == (1, 2, 1)
    assert f.monomial() == a1 * t * t


def test_rejects_non_unit_constant():
    with pytest.raises(NonUnitConstant):
        product_decompose(XSeries([QLaurent.one() * 2, t]))


def test_catalan_branch():
    Y = classical_y_branch(StripGeometry.c3(1), 6)
    assert [y.constant() for y in Y] == [1, -1, 2, -5, 14, -42, 132]
    assert all(c.is_zero() for c in branch_residual(StripGeometry.c3(1), Y))


def test_c3_minus2_branch():
    # Y^2 - Y - X = 0 with Y(0) = 1
    Y = classical_y_branch(StripGeometry.c3(-2), 5)
    assert [y.constant() for y in Y] == [1, 1, -1, 2, -5, 14]


@pytest.mark.parametrize("f", [-1, 0, 2])
def test_symbolic_branch_vanishes(f):
    g = StripGeometry.generic(2, 0, f)
    Y = classical_y_branch(g, 4)
    assert all(c.is_zero() for c in branch_residual(g, Y))


def test_symbolic_beta_branch_not_over_ring():
    # dA/dY(0, 1) = -1 + b1 has no inverse among polynomials
    with pytest.raises(NotInvertible):
        classical_y_branch(StripGeometry.generic(1, 1, 1), 3)


def test_classical_dt_c3():
    fac = classical_dt(StripGeometry.c3(1), 4)
    assert [(f.d, f.e) for f in fac.factors] == [(1, 1), (2, -2), (3, 3), (4, -8)]
    assert fac.all_integral()


NAMED = [
    (StripGeometry.c3(1), Basepoint.INF),
    (StripGeometry.c3(1), Basepoint.ONE),
    (StripGeometry.c3(-2), Basepoint.INF),
    (StripGeometry.conifold(-1), Basepoint.INF),
    (StripGeometry.conifold(-1), Basepoint.ONE),
    (StripGeometry.conifold(0), Basepoint.INF),
    (StripGeometry.conifold(0), Basepoint.ONE),
]


@pytest.mark.parametrize("geom,bp", NAMED)
def test_named_examples_integral(geom, bp):
    psi = closed_form_psi(geom, bp, 4, 10)
    fac = product_decompose(psi)
    assert fac.all_integral()
    assert roundtrip_ok(psi)


def test_refactor_reproduces():
    psi = closed_form_psi(StripGeometry.c3(1), Basepoint.INF, 4, 12)
    fac = product_decompose(psi)
    back = refactor_check(fac)
    for n in range(1, 5):
        assert back[n].truncate(fac.truncs[n]).agrees(psi[n].truncate(fac.truncs[n]))


def test_greedy_agrees_with_log_method():
    psi = closed_form_psi(StripGeometry.conifold(0), Basepoint.INF, 3, 8)
    a = product_decompose(psi)
    b = greedy_decompose(psi)
    assert {(f.d, f.mono, f.s): f.e for f in a.factors} == {(f.d, f.mono, f.s): f.e for f in b.factors}


def test_basepoint_changes_invariants():
    for g in (StripGeometry.c3(1), StripGeometry.conifold(0)):
        a = product_decompose(closed_form_psi(g, Basepoint.INF, 3, 10))
        b = product_decompose(closed_form_psi(g, Basepoint.ONE, 3, 10))
        assert a.rows() != b.rows()


def test_rows_format():
    fac = DTFactorization((DTFactor(1, 0, 3, Fraction(1, 2)),), 1, (None, None))
    row = fac.rows()[0]
    assert row == {"d": 1, "monomial": "1", "s": 3, "e": "1/2", "integral": False}
    assert not fac.all_integral()
