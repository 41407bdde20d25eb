"""Euler-product (DT-type) factorization of normalized series in X.

A normalized series psi = 1 + O(X) is written uniquely as

    psi = prod_M (1 - M)^(e_M),    M = X^d * m * t^s

with m a monomial in the parameters.  Taking logs, the degree-d part L_d of
log psi satisfies L_d = -sum_{k | d} Psi_k(E_(d/k)) / k where E_d = sum e_M M
and Psi_k raises every variable (X, t, parameters) to the k-th power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NonUnitConstant, NotInvertible, NoUnitBranch
from .geometry import ClassicalCurve, StripGeometry, classical_curve
from .series import (
    MONO_MASK,
    SHIFT,
    Direction,
    MultiPoly,
    QLaurent,
    XSeries,
    mono_exponents,
    mono_str,
)


@dataclass(frozen=True)
class DTFactor:
    d: int
    mono: int  # packed parameter monomial
    s: int  # t-exponent
    e: Fraction

    @property
    def integral(self) -> bool:
        return Fraction(self.e).denominator == 1

    @property
    def multidegree(self) -> tuple[int, ...]:
        return mono_exponents(self.mono)

    def sort_key(self):
        return (self.d, self.multidegree, self.s)

    def monomial(self) -> QLaurent:
        return QLaurent.monomial(1, self.s, self.mono)

    def as_row(self) -> dict:
        e = Fraction(self.e)
        return {
            "d": self.d,
            "monomial": mono_str(self.mono) or "1",
            "s": self.s,
            "e": str(e.numerator) if e.denominator == 1 else f"{e.numerator}/{e.denominator}",
            "integral": self.integral,
        }


@dataclass(frozen=True)
class DTFactorization:
    factors: tuple[DTFactor, ...]
    N: int
    truncs: tuple  # t-truncation of the degree-d exponent data, index d (0 unused)

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(sorted(self.factors, key=DTFactor.sort_key)))

    def all_integral(self, max_d: int | None = None) -> bool:
        return all(f.integral for f in self.factors if max_d is None or f.d <= max_d)

    def at_degree(self, d: int) -> list[DTFactor]:
        return [f for f in self.factors if f.d == d]

    def rows(self) -> list[dict]:
        return [f.as_row() for f in self.factors]


def _adams(c: QLaurent, k: int) -> QLaurent:
    """Raise t and every parameter to the k-th power."""
    if k == 1:
        return c
    out = {}
    for key, v in c.raw.items():
        te, m = key >> SHIFT, key & MONO_MASK
        out[((te * k) << SHIFT) + m * k] = v
    return QLaurent(out, None if c.trunc is None else c.trunc * k)


def _check_normalized(psi: XSeries):
    if psi.direction is not Direction.ASCENDING_X:
        raise NonUnitConstant("factorization needs an ascending-X series")
    if psi.start != 0:
        raise NonUnitConstant("series must start at X^0")
    c0 = psi[0] - 1
    if not c0.is_zero():
        raise NonUnitConstant(f"constant term is not 1: {psi[0]}")


def _capped(psi: XSeries, N: int, t_trunc: int | None) -> XSeries:
    coeffs = [psi[n] for n in range(min(N, psi.N) + 1)]
    if t_trunc is not None:
        coeffs = [c.truncate(t_trunc) for c in coeffs]
    return XSeries(coeffs, psi.direction)


def series_log(psi: XSeries) -> XSeries:
    """log psi for psi = 1 + O(X), exact rational coefficients."""
    N = psi.N
    u = XSeries([QLaurent.zero()] + list(psi.coeffs[1:]), psi.direction)
    out = XSeries([QLaurent.zero()] * (N + 1), psi.direction)
    power = u
    for m in range(1, N + 1):
        out = out + power * Fraction((-1) ** (m + 1), m)
        power = (power * u).truncate(N)
    return out


def product_decompose(psi: XSeries, N: int | None = None, t_trunc: int | None = None) -> DTFactorization:
    """Exponents e_M with psi = prod (1 - M)^(e_M), to X-order N and t-order t_trunc."""
    _check_normalized(psi)
    N = psi.N if N is None else min(N, psi.N)
    psi = _capped(psi, N, t_trunc)
    L = series_log(psi)
    E: dict[int, QLaurent] = {}
    factors = []
    truncs = [None]
    for d in range(1, N + 1):
        acc = -L[d]
        for k in range(2, d + 1):
            if d % k == 0:
                acc = acc - _adams(E[d // k], k) * Fraction(1, k)
        E[d] = acc
        truncs.append(acc.trunc)
        for key, v in acc.raw.items():
            factors.append(DTFactor(d, key & MONO_MASK, key >> SHIFT, Fraction(v)))
    return DTFactorization(tuple(factors), N, tuple(truncs))


def _binomial_series(e: Fraction, kmax: int) -> list[Fraction]:
    """Coefficients of (1 - y)^e up to y^kmax."""
    out = [Fraction(1)]
    for k in range(1, kmax + 1):
        out.append(out[-1] * (e - k + 1) / k * -1)
    return out


def greedy_decompose(psi: XSeries, N: int | None = None, t_trunc: int | None = None) -> DTFactorization:
    """Reference greedy divide-out in the graded order (slow, used as an oracle)."""
    _check_normalized(psi)
    N = psi.N if N is None else min(N, psi.N)
    R = _capped(psi, N, t_trunc)
    factors = []
    truncs = [None]
    for d in range(1, N + 1):
        cd = R[d]
        truncs.append(cd.trunc)
        order = sorted(cd.raw.items(), key=lambda kv: (mono_exponents(kv[0] & MONO_MASK), kv[0] >> SHIFT))
        for key, c in order:
            e = -Fraction(c)
            fac = DTFactor(d, key & MONO_MASK, key >> SHIFT, e)
            factors.append(fac)
            R = _multiply_factor(R, fac.monomial(), d, -e, N)
    return DTFactorization(tuple(factors), N, tuple(truncs))


def _multiply_factor(R: XSeries, M: QLaurent, d: int, e: Fraction, N: int) -> XSeries:
    """R * (1 - M X^d)^e."""
    binom = _binomial_series(e, N // d)
    powers = [QLaurent.one()]
    for _ in range(N // d):
        powers.append(powers[-1] * M)
    out = []
    for n in range(N + 1):
        acc = R[n]
        for k in range(1, n // d + 1):
            if binom[k]:
                acc = acc + R[n - k * d] * powers[k] * binom[k]
        out.append(acc)
    return XSeries(out, R.direction)


def refactor_check(fac: DTFactorization, N: int | None = None, t_trunc: int | None = None) -> XSeries:
    """Expand prod (1 - M)^e back into a series (truncated like the source data)."""
    N = fac.N if N is None else N
    R = XSeries.one(N)
    for f in fac.factors:
        if f.d <= N:
            R = _multiply_factor(R, f.monomial(), f.d, f.e, N)
    coeffs = []
    for n in range(N + 1):
        c = R[n]
        if t_trunc is not None:
            c = c.truncate(t_trunc)
        coeffs.append(c)
    return XSeries(coeffs)


def roundtrip_ok(psi: XSeries, N: int | None = None, t_trunc: int | None = None) -> bool:
    """Decompose, re-expand and compare on the t-range where the exponents are known."""
    fac = product_decompose(psi, N, t_trunc)
    back = refactor_check(fac, fac.N)
    src = _capped(psi, fac.N, t_trunc)
    # exponents at degree d are known below truncs[d]; compare each X^n below the
    # smallest bound any contributing degree imposes
    for n in range(1, fac.N + 1):
        bound = src[n].trunc
        diff = (back[n] - src[n])
        if bound is not None:
            diff = diff.truncate(_known_bound(fac, n, bound))
        if not diff.is_zero():
            return False
    return True


def _known_bound(fac: DTFactorization, n: int, bound: int) -> int:
    # degree-n output only uses E_d for d <= n; E_n itself carries trunc truncs[n]
    t = fac.truncs[n]
    return bound if t is None else min(bound, t)


# ---------------------------------------------------------------------------
# classical branch
# ---------------------------------------------------------------------------


def _ps_mul(a: list, b: list, N: int) -> list:
    out = [MultiPoly() for _ in range(N + 1)]
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j in range(N + 1 - i):
            if j < len(b) and not b[j].is_zero():
                out[i + j] = out[i + j] + x * b[j]
    return out


def _ps_inv(a: list, N: int) -> list:
    c0 = a[0]
    if not c0.is_constant() or c0.constant() == 0:
        raise NotInvertible(f"constant term {c0} is not a unit")
    inv0 = Fraction(1) / c0.constant() if isinstance(c0.constant(), (int, Fraction)) else 1 / c0.constant()
    out = [MultiPoly.const(inv0)]
    for n in range(1, N + 1):
        acc = MultiPoly()
        for k in range(1, n + 1):
            if k < len(a):
                acc = acc + a[k] * out[n - k]
        out.append(acc * (-inv0))
    return out


def _ps_pow(a: list, e: int, N: int) -> list:
    if e < 0:
        a, e = _ps_inv(a, N), -e
    out = [MultiPoly.const(1)] + [MultiPoly() for _ in range(N)]
    for _ in range(e):
        out = _ps_mul(out, a, N)
    return out


def _eval_y_poly(coeffs: dict, Y: list, N: int) -> list:
    """sum_j coeffs[j] Y^j as an X-series (j may be negative)."""
    out = [MultiPoly() for _ in range(N + 1)]
    for j, c in coeffs.items():
        pw = _ps_pow(Y, j, N)
        for n in range(N + 1):
            out[n] = out[n] + pw[n] * c
    return out


def classical_y_branch(geom: StripGeometry, N: int) -> list[MultiPoly]:
    """Coefficients y_0..y_N of the branch Y(X) = 1 + O(X) of A(X, Y) = 0."""
    A = classical_curve(geom)
    P0 = A.coeff_in_x(0)
    P1 = A.coeff_in_x(1)
    a01 = sum((c for c in P0.values()), MultiPoly())
    if not a01.is_zero():
        raise NoUnitBranch("A(0, 1) != 0, so no branch with Y(0) = 1")
    # A_Y(0, 1) must be a unit for Newton steps
    dA = sum((c * j for j, c in P0.items()), MultiPoly())
    if not dA.is_constant() or dA.constant() == 0:
        raise NotInvertible(f"dA/dY at (0,1) is {dA}, not a unit; the branch is not a power series over the parameter ring")
    Y = [MultiPoly.const(1)] + [MultiPoly() for _ in range(N)]
    dP0 = {j - 1: c * j for j, c in P0.items() if j}
    dP1 = {j - 1: c * j for j, c in P1.items() if j}
    prec = 1
    while prec <= N:
        prec = min(2 * prec, N + 1)
        n = prec - 1
        Yn = Y[: n + 1]
        F = _eval_y_poly(P0, Yn, n)
        G = _eval_y_poly(P1, Yn, n)
        F = [F[k] + (G[k - 1] if k >= 1 else MultiPoly()) for k in range(n + 1)]
        dF = _eval_y_poly(dP0, Yn, n)
        dG = _eval_y_poly(dP1, Yn, n)
        dF = [dF[k] + (dG[k - 1] if k >= 1 else MultiPoly()) for k in range(n + 1)]
        step = _ps_mul(F, _ps_inv(dF, n), n)
        Y = [Yn[k] - step[k] for k in range(n + 1)] + Y[n + 1:]
    return Y[: N + 1]


def branch_residual(geom: StripGeometry, Y: list[MultiPoly]) -> list[MultiPoly]:
    """A(X, Y(X)) as an X-series to the order of Y."""
    N = len(Y) - 1
    A = classical_curve(geom)
    F = _eval_y_poly(A.coeff_in_x(0), Y, N)
    G = _eval_y_poly(A.coeff_in_x(1), Y, N)
    return [F[k] + (G[k - 1] if k >= 1 else MultiPoly()) for k in range(N + 1)]


def classical_dt(geom: StripGeometry, N: int) -> DTFactorization:
    """Exponents b with Y(X) = prod (1 - X^d m)^(d b); reported e is d*b."""
    Y = classical_y_branch(geom, N)
    psi = XSeries([QLaurent.from_levels({0: c}) for c in Y])
    return product_decompose(psi, N)
