import cmath
import math

import pytest

from qstrip.barnes import (
    KAPPA,
    _zmul,
    build_integrand,
    factor_shift_ratio,
    gaussian_at_pole,
    gaussian_numeric,
    integrand_shift_check,
    numeric_psi,
    numeric_report,
    numeric_values,
    pole_delta_coefficient,
    printed_shift_ratio,
    residue_sum,
    residue_terms,
    series_coefficient,
    symbolic_integrand,
    trivial_integrand,
)
from qstrip.errors import ConfigInvalid, ConvergenceBudget, ResidualNonzero, UnsupportedFraming
from qstrip.geometry import StripGeometry
from qstrip.quantization import Basepoint


def _clean(p):
    return {k: v for k, v in p.items() if not v.is_zero()}


def test_integrand_names():
    assert build_integrand(StripGeometry.c3(1)).name == "F_inf"
    assert build_integrand(StripGeometry.conifold(0), Basepoint.ONE).name == "G_1"
    assert build_integrand(StripGeometry.generic(2, 1, 0)).name == "L_inf"


def test_bp1_needs_framing():
    with pytest.raises(UnsupportedFraming):
        build_integrand(StripGeometry.c3(-2), Basepoint.ONE)


def test_trivial_integrand_shift():
    # 1/(z;q)_inf: L(qz) = (1 - z) L(z)
    num, den = factor_shift_ratio(trivial_integrand())
    assert _clean(den) == {0: den[0]} and den[0] == 1
    assert integrand_shift_check(trivial_integrand(), 10, 5, ratio="factor").ok


SHIFT_CASES = [
    (StripGeometry.c3(1), Basepoint.INF),
    (StripGeometry.c3(1), Basepoint.ONE),
    (StripGeometry.c3(-2), Basepoint.INF),
    (StripGeometry.conifold(0), Basepoint.INF),
    (StripGeometry.conifold(-1), Basepoint.ONE),
    (StripGeometry.generic(1, 1, 1), Basepoint.INF),
    (StripGeometry.generic(0, 2, 0), Basepoint.INF),
]


@pytest.mark.parametrize("geom,bp", SHIFT_CASES)
def test_factor_ratio_annihilates(geom, bp):
    chk = integrand_shift_check(build_integrand(geom, bp), 8, 4, ratio="factor")
    assert chk.ok


@pytest.mark.parametrize("geom,bp", SHIFT_CASES)
def test_printed_ratio_is_same_rational_function(geom, bp):
    ig = build_integrand(geom, bp)
    pn, pd = printed_shift_ratio(ig)
    fn, fd = factor_shift_ratio(ig)
    lhs, rhs = _clean(_zmul(pn, fd)), _clean(_zmul(fn, pd))
    # equal up to an overall monomial rescaling in z
    assert len(lhs) == len(rhs)
    shift = min(lhs) - min(rhs)
    assert all(k - shift in rhs for k in lhs)
    for k in lhs:
        assert (lhs[k] * rhs[min(rhs)]).agrees(rhs[k - shift] * lhs[min(lhs)])


@pytest.mark.parametrize("geom,bp", SHIFT_CASES)
def test_printed_residual_is_pole_term(geom, bp):
    ig = build_integrand(geom, bp)
    chk = integrand_shift_check(ig, 8, 4, ratio="printed")
    assert not chk.ok
    assert chk.kernel_order() == 1
    const = chk.constant_value()
    assert const is not None
    assert pole_delta_coefficient(ig, 8).agrees(const)


def test_raise_on_failure():
    with pytest.raises(ResidualNonzero):
        integrand_shift_check(build_integrand(StripGeometry.c3(0)), 6, 3, raise_on_failure=True)


RESIDUE_CASES = [
    (StripGeometry.c3(1), Basepoint.INF),
    (StripGeometry.c3(1), Basepoint.ONE),
    (StripGeometry.conifold(-1, 0.1), Basepoint.INF),
    (StripGeometry.conifold(0, 0.1), Basepoint.ONE),
    (StripGeometry((0.1,), (0.2,), 0), Basepoint.INF),
]


@pytest.mark.parametrize("geom,bp", RESIDUE_CASES)
def test_each_residue_is_a_series_term(geom, bp):
    q, x = 0.3, -2.0
    res = residue_terms(symbolic_integrand(geom, bp), x, q, 8, numeric_values(geom))
    for n, r in enumerate(res):
        assert abs(r - series_coefficient(geom, bp, q, n) * cmath.exp(x) ** n) < 1e-14


def test_n0_residue_normalization():
    for geom in (StripGeometry.c3(1), StripGeometry.conifold(-1, 0.1)):
        r0 = residue_terms(symbolic_integrand(geom), -2.0, 0.25, 0, numeric_values(geom))[0]
        assert abs(r0 - 1) < 1e-14
    assert KAPPA == 2j * math.pi


@pytest.mark.parametrize("geom,bp", RESIDUE_CASES)
def test_residue_sum_matches_series(geom, bp):
    rep = numeric_report(geom, bp, -3.0, 0.25, 25, 25)
    assert rep.delta < 1e-8


def test_gaussian_data_matches_numeric():
    for f in (-2, 0, 1, 3):
        ig = build_integrand(StripGeometry.c3(f))
        for n in range(4):
            qexp, xpow, sign = gaussian_at_pole(ig, n)
            exact = 0.3 ** float(qexp) * cmath.exp(-1.5) ** xpow * sign
            assert abs(gaussian_numeric(ig, 0.3 ** -n, -1.5, 0.3) - exact) < 1e-12 * max(1, abs(exact))


def test_framing_rescales_residues():
    # f -> f+1 multiplies the n-th residue by (-1)^n q^(n^2/2)
    q, x = 0.3, -1.0
    g0, g1 = StripGeometry.conifold(0, 0.2), StripGeometry.conifold(1, 0.2)
    r0 = residue_terms(symbolic_integrand(g0), x, q, 6, numeric_values(g0))
    r1 = residue_terms(symbolic_integrand(g1), x, q, 6, numeric_values(g1))
    for n in range(7):
        assert abs(r1[n] - r0[n] * (-1) ** n * q ** (n * n / 2)) < 1e-14


def test_divergent_framing_reported():
    with pytest.raises(ConvergenceBudget):
        numeric_psi(StripGeometry.c3(-2), Basepoint.INF, -2.0, 0.3, 25)


def test_q_domain():
    with pytest.raises(ConfigInvalid):
        residue_sum(StripGeometry.c3(1), Basepoint.INF, -2.0, 1.5)
