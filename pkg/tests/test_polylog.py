import cmath
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qstrip.polylog import bernoulli, li2, polylog, polylog_nonpos


def mp_li(s, z):
    return complex(mpmath.polylog(s, mpmath.mpc(z.real, z.imag)))


@pytest.mark.parametrize("z", [0.3, -0.7, 0.5, 0.99, -5.0, 2.5 + 1j, 1j, -1 + 0.2j, 0.6 - 0.8j, 10 - 3j])
def test_li2_matches_mpmath(z):
    assert abs(li2(complex(z)) - mp_li(2, complex(z))) < 1e-13 * max(1, abs(mp_li(2, complex(z))))


def test_li2_special_values():
    assert li2(0) == 0
    assert abs(li2(1) - cmath.pi**2 / 6) < 1e-14
    assert abs(li2(-1) + cmath.pi**2 / 12) < 1e-14


@settings(max_examples=200)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_li2_random(re, im):
    z = complex(re, im)
    if abs(z - 1) < 1e-3:
        return
    ref = mp_li(2, z)
    assert abs(li2(z) - ref) < 1e-12 * max(1, abs(ref))


@pytest.mark.parametrize("s", [0, -1, -2, -3])
@pytest.mark.parametrize("z", [0.3, -0.5, 0.2 + 0.4j])
def test_nonpositive_orders(s, z):
    assert abs(polylog_nonpos(s, z) - mp_li(s, z)) < 1e-12
    assert abs(polylog(s, z) - mp_li(s, z)) < 1e-12


def test_li1_is_log():
    z = 0.4 + 0.1j
    assert abs(polylog(1, z) + cmath.log(1 - z)) < 1e-14


def test_bernoulli():
    assert [bernoulli(n) for n in range(7)] == [1, Fraction(-1, 2), Fraction(1, 6), 0, Fraction(-1, 30), 0, Fraction(1, 42)]
