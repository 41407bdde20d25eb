from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qstrip.errors import Divergent, NotInvertible, TruncatedCoefficient
from qstrip.series import (
    Direction,
    MultiPoly,
    QLaurent,
    XSeries,
    euler_series,
    inv_poch_finite,
    inv_poch_inf,
    ql_inv,
    ql_mul,
    mono,
    poch_finite,
    poch_inf,
    q_pow,
)

t = QLaurent.t()
a1 = QLaurent.param("a1")
b1 = QLaurent.param("b1")


def poly(*coeffs, start=0, trunc=None):
    return QLaurent.from_levels({start + i: c for i, c in enumerate(coeffs)}, trunc)


# --- hypothesis strategies ------------------------------------------------------

small = st.integers(-3, 3)
params = st.sampled_from([0, mono("a1"), mono("b1"), mono("a1") + mono("b2"), 2 * mono("a2")])


@st.composite
def qlaurents(draw, exact=None):
    terms = draw(st.dictionaries(st.tuples(st.integers(-2, 5), params), small, max_size=5))
    raw = {}
    for (e, m), c in terms.items():
        raw[(e << 256) + m] = c
    if exact is None:
        exact = draw(st.booleans())
    trunc = None if exact else draw(st.integers(3, 9))
    return QLaurent(raw, trunc)


@settings(max_examples=200)
@given(qlaurents(), qlaurents(), qlaurents())
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c) or ((a * b) * c).agrees(a * (b * c))
    assert (a * (b + c)).agrees(a * b + a * c)
    assert a * b == b * a
    assert a + b == b + a


@settings(max_examples=200)
@given(qlaurents(exact=True), qlaurents(exact=True), qlaurents(exact=True))
def test_ring_axioms_exact(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_zero()


@settings(max_examples=100)
@given(qlaurents(), st.integers(2, 12))
def test_inverse_roundtrip(a, trunc):
    lead = a.leading()[1] if not a.is_zero() else None
    if lead is None or not lead.is_constant():
        with pytest.raises(NotInvertible):
            ql_inv(a, trunc)
        return
    inv = ql_inv(a, trunc)
    prod = a * inv
    assert prod.agrees(QLaurent.one())
    assert prod.trunc is not None


@given(qlaurents(exact=False))
def test_stored_exponents_below_trunc(a):
    assert all(e < a.trunc for e in a.terms)


def test_mul_examples():
    assert ql_mul(1 - t, 1 + t) == 1 - t * t
    u = a1 * t + 3
    assert ql_mul(u, QLaurent.one()) == u
    assert (1 - a1 * t) * (1 - b1 * t) == 1 - (a1 + b1) * t + a1 * b1 * t * t


def test_trunc_propagation():
    x = poly(1, 1, 1, trunc=3)  # 1 + t + t^2 + O(t^3)
    y = t.shift(2)  # t^3 exact
    assert (x * y).trunc == 6
    assert (x * x).trunc == 3
    assert (t * t).trunc is None


def test_inv_examples():
    assert ql_inv(1 - t, 4) == poly(1, 1, 1, 1, trunc=4)
    assert ql_inv(QLaurent.one(), 5).agrees(QLaurent.one())
    assert ql_inv((1 - t) * (1 - t * t), 4) == poly(1, 1, 2, 2, trunc=4)


def test_inv_rejects_parameter_lead():
    with pytest.raises(NotInvertible):
        ql_inv(a1 + t, 4)
    with pytest.raises(NotInvertible):
        ql_inv(QLaurent.zero(), 4)


def test_inv_laurent_lead():
    # t^-1 (1 - t) inverts to t (1 + t + ...)
    x = t.shift(-2) - QLaurent.t(0).shift(0) * t.shift(-1)
    inv = ql_inv(x, 5)
    assert (x * inv).agrees(QLaurent.one())
    assert inv.valuation() == 1


def test_poch_finite_examples():
    assert poch_finite(t, 0) == QLaurent.one()
    assert poch_finite(t, 1) == 1 - t
    assert poch_finite(a1 * t, 2) == 1 - a1 * t - a1 * t.shift(2) + a1 * a1 * t.shift(3)


@pytest.mark.parametrize("u", [t, a1 * t, b1 * t * t])
def test_poch_recursion(u):
    for n in range(12):
        assert poch_finite(u, n + 1) == poch_finite(u, n) * (1 - u.shift(2 * n))


def test_poch_inf_examples():
    assert poch_inf(t * t, 5) == poly(1, 0, -1, 0, -1, trunc=5)
    assert poch_inf(t, 1).coefficient(0) == MultiPoly.const(1)
    with pytest.raises(Divergent):
        poch_inf(QLaurent.one(), 5)


@pytest.mark.parametrize("u", [t, a1 * t, t.shift(1)])
def test_poch_inf_splits(u):
    for n in range(4):
        lhs = poch_inf(u, 14)
        rhs = poch_finite(u, n) * poch_inf(u.shift(2 * n), 14)
        assert lhs.agrees(rhs)


def test_inv_poch_inverts():
    for u in (t, a1 * t, t.shift(2)):
        assert (poch_inf(u, 12) * inv_poch_inf(u, 12)).agrees(QLaurent.one())
        for n in range(5):
            assert (poch_finite(u, n) * inv_poch_finite(u, n, 10)).agrees(QLaurent.one())


def test_euler_identity():
    # sum_n w^n/(q;q)_n = 1/(w;q)_inf for w of positive t-order
    for w in (t, a1 * t):
        lhs = sum(euler_series(w, 6, 6), QLaurent.zero(6))
        assert lhs.agrees(inv_poch_inf(w, 6))


def test_q_pow_half_integers():
    assert q_pow(Fraction(3, 2)) == t.shift(2)
    assert q_pow(-1) == t.shift(-3)


def test_at_t_one():
    x = 1 - a1 * t + t * t
    assert x.at_t_one() == MultiPoly.const(2) - MultiPoly.var("a1")
    with pytest.raises(TruncatedCoefficient):
        x.truncate(5).at_t_one()


def test_agreement_order():
    x = poly(1, 2, 3, trunc=3)
    y = poly(1, 2, 4, 5)
    assert x.agreement_order(y) == 2
    assert not x.agrees(y)
    assert x.agrees(poly(1, 2, 3, 9))


def test_evaluate():
    x = 1 - a1 * t
    assert x.evaluate(0.5, {"a1": 2.0}) == pytest.approx(0.0)


def test_xseries_ops():
    one = XSeries.one(3)
    s = XSeries([QLaurent.one(), t, t * t, QLaurent.zero()])
    assert (s * one).agrees(s)
    assert (s - s).is_zero()
    assert s.first_disagreement(one) == (1, 1)
    with pytest.raises(Exception):
        s.agrees(XSeries.one(3, direction=Direction.ASCENDING_X_INVERSE))


def test_multipoly_evaluate():
    p = MultiPoly.var("a1") * MultiPoly.var("b2") + 3
    assert p.evaluate({"a1": 2, "b2": 5}) == 13
