"""Numeric polylogarithms: Li2 on the principal branch and Li_s for integer s <= 1."""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

PI2_6 = math.pi ** 2 / 6


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n with B_1 = -1/2."""
    B = [Fraction(1)]
    for m in range(1, n + 1):
        acc = Fraction(0)
        for k in range(m):
            acc += math.comb(m + 1, k) * B[k]
        B.append(-acc / (m + 1))
    return B[n]


def bernoulli_poly(n: int, x: Fraction) -> Fraction:
    return sum((math.comb(n, k) * bernoulli(k) * x ** (n - k) for k in range(n + 1)), Fraction(0))


_LI2_COEFFS = [float(bernoulli(n)) / math.factorial(n + 1) for n in range(48)]


def _li2_bernoulli(z: complex) -> complex:
    # Li2(z) = sum_n B_n u^(n+1)/(n+1)!, u = -log(1-z); fine for |u| well below 2 pi
    u = -cmath.log(1 - z)
    u2 = u * u
    total = u - u2 / 4
    p = u
    for n in range(2, 48, 2):
        p *= u2
        term = _LI2_COEFFS[n] * p
        total += term
        if abs(term) < 1e-18 * abs(total):
            break
    return total


def li2(z: complex) -> complex:
    """Dilogarithm, principal branch (cut along [1, inf))."""
    z = complex(z)
    if z == 0:
        return 0j
    if z == 1:
        return complex(PI2_6)
    if abs(z) > 1:
        # inversion; on the cut take the value from below, like mpmath
        lz = cmath.log(-z)
        if z.imag == 0 and z.real > 1:
            lz = complex(lz.real, math.pi)
        return -PI2_6 - 0.5 * lz ** 2 - li2(1 / z)
    if z.real > 0.5:
        # reflection
        return PI2_6 - cmath.log(z) * cmath.log(1 - z) - _li2_bernoulli(1 - z)
    return _li2_bernoulli(z)


@lru_cache(maxsize=None)
def _eulerian_row(k: int) -> tuple[int, ...]:
    row = [1]
    for n in range(2, k + 1):
        new = [0] * n
        for j in range(n):
            if j < len(row):
                new[j] += (j + 1) * row[j]
            if j >= 1:
                new[j] += (n - j) * row[j - 1]
        row = new
    return tuple(row)


def polylog_nonpos(s: int, z: complex) -> complex:
    """Li_s(z) for integer s <= 1 as a rational function of z."""
    if s > 1:
        raise ValueError("polylog_nonpos handles s <= 1 only")
    if s == 1:
        return -cmath.log(1 - z)
    if s == 0:
        return z / (1 - z)
    k = -s
    row = _eulerian_row(k)
    num = sum(c * z ** j for j, c in enumerate(row))
    return z * num / (1 - z) ** (k + 1)


def polylog(s: int, z: complex) -> complex:
    if s == 2:
        return li2(z)
    return polylog_nonpos(s, z)
