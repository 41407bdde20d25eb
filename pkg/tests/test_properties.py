"""Randomized invariants across geometries and basepoints."""

import cmath
import math

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from qstrip.dt import product_decompose, refactor_check
from qstrip.dual import dual_wave, verify_dual_difference
from qstrip.geometry import StripGeometry, classical_curve, saddle_potential
from qstrip.quantization import Basepoint, apply_operator, build_quantum_curve, closed_form_psi, frobenius_solve
from qstrip.quiver import quiver_eval, to_quiver
from qstrip.series import QLaurent, XSeries


@st.composite
def symbolic_cases(draw, max_width=2):
    r = draw(st.integers(0, max_width))
    s = draw(st.integers(0, max_width))
    f = draw(st.integers(-3, 3))
    bps = [Basepoint.INF] + ([Basepoint.ONE] if f >= -1 else [])
    return StripGeometry.generic(r, s, f), draw(st.sampled_from(bps))


@settings(max_examples=40)
@given(symbolic_cases())
def test_operator_kills_series_above_degree0(case):
    geom, bp = case
    res = apply_operator(build_quantum_curve(geom, bp), closed_form_psi(geom, bp, 4, 10))
    assert all(res[n].is_zero() for n in res.degrees() if n >= 1)


@settings(max_examples=40)
@given(symbolic_cases())
def test_frobenius_equals_closed_form(case):
    geom, bp = case
    fr = frobenius_solve(build_quantum_curve(geom, bp), N=4, t_trunc=10)
    assert fr.first_disagreement(closed_form_psi(geom, bp, 4, 10)) is None


@settings(max_examples=25)
@given(symbolic_cases(max_width=1))
def test_quiver_equals_closed_form(case):
    geom, bp = case
    if geom.f < -1:
        # principal node has no quadratic growth in t, so the Nahm sum is not t-adic
        return
    qs = quiver_eval(to_quiver(geom, bp), 3, 8)
    assert qs.first_disagreement(closed_form_psi(geom, bp, 3, 8)) is None


@settings(max_examples=30)
@given(st.integers(0, 2), st.integers(0, 2), st.integers(-3, 3))
def test_dual_difference_equation(r, s, f):
    assert verify_dual_difference(dual_wave(StripGeometry.generic(r, s, f), 6), t_trunc=10).ok


factors = st.lists(
    st.tuples(st.integers(1, 3), st.integers(0, 5), st.integers(-2, 2).filter(bool)),
    min_size=1, max_size=4, unique_by=lambda x: x[:2],
)


@settings(max_examples=60)
@given(factors)
def test_decompose_recovers_exponents(fs):
    N, T = 3, 12
    psi = XSeries.one(N)
    for d, s, e in fs:
        psi = _times_factor(psi, d, QLaurent.t(s), e, N, T)
    fac = product_decompose(psi, N)
    got = {(f.d, f.s): f.e for f in fac.factors if f.e}
    want = {(d, s): e for d, s, e in fs if d <= N}
    assert got == want
    back = refactor_check(fac)
    for n in range(1, N + 1):
        assert back[n].agrees(psi[n])


def _times_factor(psi, d, m, e, N, T):
    # (1 - m X^d)^e as a binomial series, e may be negative
    coeffs = [QLaurent.zero(T) for _ in range(N + 1)]
    binom = 1
    for k in range(N // d + 1):
        coeffs[k * d] = (m ** k) * ((-1) ** k * binom)
        binom = binom * (e - k) // (k + 1)  # exact for integer e of either sign
    factor = XSeries([c.truncate(T) for c in coeffs])
    return psi * factor


@settings(max_examples=40)
@given(
    st.lists(st.floats(0.05, 0.6), max_size=2),
    st.lists(st.floats(0.05, 0.6), max_size=2),
    st.integers(-2, 2),
    st.floats(-3, 1),
    st.floats(-math.pi, math.pi),
)
def test_saddle_points_on_curve(alphas, betas, f, re, im):
    # a common alpha = beta cancels in W but not in the curve
    assume(all(abs(a - b) > 1e-3 for a in alphas for b in betas))
    geom = StripGeometry(tuple(alphas), tuple(betas), f)
    # keep away from x where an extreme Y-coefficient vanishes (a root runs off)
    X = cmath.exp(complex(re, im))
    lo, hi = classical_curve(geom).y_range()
    assume(min(abs(_y_coeff(geom, X, lo)), abs(_y_coeff(geom, X, hi))) > 1e-3)
    sr = saddle_potential(geom, complex(re, im))
    assert max(sr.curve_residuals(geom), default=0.0) < 1e-9
    for z in sr.critical_points:
        assert abs(cmath.exp(sr.dW(z)) - 1) < 1e-8


def _y_coeff(geom, X, j):
    return sum(c.evaluate({}) * X ** i for (i, jj), c in classical_curve(geom).terms.items() if jj == j)
