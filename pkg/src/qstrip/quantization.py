"""Quantum curves as q-difference operators, their series solutions and classical limits.

Operators are normal ordered as X^a sigma^b with sigma X = q X sigma, where
sigma shifts x by hbar.  Acting on a series sum c_n X^n, the term X^a sigma^b
sends c_m X^m to q^(b m) c_m X^(m + a).
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import (
    DirectionMismatch,
    IndicialObstruction,
    NotInvertible,
    TruncatedCoefficient,
    UnsupportedFraming,
)
from .geometry import ClassicalCurve, StripGeometry, classical_curve
from .series import (
    Direction,
    QLaurent,
    XSeries,
    inv_poch_finite,
    ql_inv,
)

log = logging.getLogger(__name__)


class Basepoint(enum.Enum):
    INF = "inf"
    ONE = "1"

    @classmethod
    def parse(cls, v) -> "Basepoint":
        if isinstance(v, Basepoint):
            return v
        s = str(v).strip().lower()
        if s in ("inf", "infinity", "oo", "∞"):
            return cls.INF
        if s in ("1", "one"):
            return cls.ONE
        raise ValueError(f"unknown basepoint {v!r}")


# ---------------------------------------------------------------------------
# QOperator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QOperator:
    """sum coeff * X^a sigma^b, stored as {(a, b): QLaurent}."""

    terms: Mapping[tuple[int, int], QLaurent] = field(default_factory=dict)

    def __post_init__(self):
        clean = {k: v for k, v in self.terms.items() if not (v.is_zero() and v.is_exact())}
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    @classmethod
    def const(cls, c) -> "QOperator":
        c = c if isinstance(c, QLaurent) else QLaurent.one() * c
        return cls({(0, 0): c})

    @classmethod
    def X(cls, a: int = 1) -> "QOperator":
        return cls({(a, 0): QLaurent.one()})

    @classmethod
    def sigma(cls, b: int = 1) -> "QOperator":
        return cls({(0, b): QLaurent.one()})

    def __add__(self, other):
        other = other if isinstance(other, QOperator) else QOperator.const(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return QOperator(out)

    __radd__ = __add__

    def __neg__(self):
        return QOperator({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        """Composition; sigma^b X^c = q^(bc) X^c sigma^b."""
        if not isinstance(other, QOperator):
            c = other if isinstance(other, QLaurent) else QLaurent.one() * other
            return QOperator({k: v * c for k, v in self.terms.items()})
        out: dict[tuple[int, int], QLaurent] = {}
        for (a, b), v in self.terms.items():
            for (c, d), w in other.terms.items():
                k = (a + c, b + d)
                term = (v * w).shift(2 * b * c)
                out[k] = out[k] + term if k in out else term
        return QOperator(out)

    def __rmul__(self, other):
        return self * other

    def __eq__(self, other):
        if not isinstance(other, QOperator):
            return NotImplemented
        return self.terms == other.terms

    def x_degrees(self) -> list[int]:
        return sorted({a for a, _ in self.terms})

    def symbol(self, a: int, u: QLaurent) -> QLaurent:
        """S_a(u) = sum_b coeff_(a,b) u^b for a single-term u."""
        out = QLaurent.zero()
        for (aa, b), v in self.terms.items():
            if aa == a:
                out = out + v * _mono_pow(u, b)
        return out

    def symbol_at_q_power(self, a: int, m: int) -> QLaurent:
        """S_a(q^m)."""
        out = QLaurent.zero()
        for (aa, b), v in self.terms.items():
            if aa == a:
                out = out + v.shift(2 * b * m)
        return out

    def is_exact(self) -> bool:
        return all(v.is_exact() for v in self.terms.values())

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (a, b), v in self.terms.items():
            ops = []
            if a:
                ops.append("X" if a == 1 else f"X^{a}")
            if b:
                ops.append("S" if b == 1 else f"S^{b}")
            parts.append(f"({v})" + ("*" + "*".join(ops) if ops else ""))
        return " + ".join(parts)

    __repr__ = __str__


def _mono_pow(u: QLaurent, b: int) -> QLaurent:
    if b >= 0:
        return u ** b
    k, lead = u.leading() if len(u) == 1 else (None, None)
    if lead is None or not lead.is_constant() or not u.is_exact():
        raise NotInvertible("negative powers need an exact c*t^k")
    return QLaurent.monomial(Fraction(1) / Fraction(lead.constant()) ** -b, k * b)


def _sigma_product(factors: Iterable[QLaurent]) -> QOperator:
    """prod_j (1 - u_j sigma)."""
    out = QOperator.const(1)
    for u in factors:
        out = out * (QOperator.const(1) - QOperator.sigma() * u)
    return out


def curve_pieces(geom: StripGeometry) -> tuple[QOperator, QOperator]:
    """(K, B) with A_inf = X K(sigma) - B(sigma)."""
    f = geom.f
    t = QLaurent.t()
    sign = 1 if (f + 1) % 2 == 0 else -1
    # (-1)^(f+1) q^(1+f/2) sigma^(1+f)
    K = QOperator({(0, 1 + f): QLaurent.t(2 + f) * sign})
    K = K * _sigma_product(a * t for a in geom.alpha_ql())
    tinv = QLaurent.t(-1)
    B = _sigma_product([tinv] + [b * tinv for b in geom.beta_ql()])
    return K, B


def build_quantum_curve(geom: StripGeometry, bp=Basepoint.INF, *, printed: bool = False) -> QOperator:
    """Quantum curve at basepoint inf or 1.

    At bp=1 the default operator is A_inf composed on the right with (q sigma - 1),
    which annihilates the bp=1 series above degree 0.  ``printed=True`` gives the
    variant with (sigma - 1) instead, whose normalized series solution is trivial.
    """
    bp = Basepoint.parse(bp)
    K, B = curve_pieces(geom)
    X = QOperator.X()
    if bp is Basepoint.INF:
        return X * K - B
    if geom.f < -1:
        raise UnsupportedFraming(f"basepoint 1 needs f >= -1, got f={geom.f}")
    step = QOperator.sigma() * (1 if printed else QLaurent.t(2)) - 1
    return X * step * K - step * B


# ---------------------------------------------------------------------------
# Action on series
# ---------------------------------------------------------------------------


def apply_operator(op: QOperator, psi: XSeries) -> XSeries:
    """Coefficientwise action of op on psi, to the order psi determines."""
    if not op.terms:
        return XSeries([QLaurent.zero()] * len(psi.coeffs), psi.direction, psi.start)
    amax = max(op.x_degrees())
    if psi.direction is Direction.ASCENDING_X:
        lo, hi = psi.start, psi.N
        out = []
        for n in range(lo, hi + 1):
            acc = QLaurent.zero()
            for (a, b), v in op.terms.items():
                m = n - a
                if m < psi.start:
                    continue
                acc = acc + (v * psi[m]).shift(2 * b * m)
            out.append(acc)
        return XSeries(out, psi.direction, lo)
    # E = 1/X: X^a sigma^b E^m = q^(-bm) E^(m - a)
    lo, hi = psi.start - amax, psi.N - amax
    out = []
    for n in range(lo, hi + 1):
        acc = QLaurent.zero()
        for (a, b), v in op.terms.items():
            m = n + a
            if m < psi.start or m > psi.N:
                continue
            acc = acc + (v * psi[m]).shift(-2 * b * m)
        out.append(acc)
    return XSeries(out, psi.direction, lo)


def _divide(num: QLaurent, den: QLaurent, n: int) -> QLaurent:
    """num / den keeping num's relative precision."""
    v = int(den.valuation())
    levels = max(1, num.trunc - int(num.valuation())) if num.trunc is not None else 1
    try:
        inv = ql_inv(den, -v + levels)
    except NotInvertible as exc:
        raise IndicialObstruction(n, f"symbol not invertible at n={n}: {exc}") from None
    return num * inv


def frobenius_solve(op: QOperator, direction=Direction.ASCENDING_X, N: int = 10,
                    t_trunc: int = 24) -> XSeries:
    """Normalized series solution c_0 = 1 of op psi = 0, c_n known to t-order val + t_trunc."""
    direction = Direction(direction)
    degs = op.x_degrees()
    if degs[0] != 0:
        raise IndicialObstruction(0, "operator has no X-degree-0 part")
    c = [QLaurent.one().truncate(t_trunc)]
    if direction is Direction.ASCENDING_X:
        for n in range(1, N + 1):
            rhs = QLaurent.zero()
            for a in degs[1:]:
                if n - a >= 0:
                    rhs = rhs + op.symbol_at_q_power(a, n - a) * c[n - a]
            s0 = op.symbol_at_q_power(0, n)
            if s0.is_zero():
                raise IndicialObstruction(n)
            c.append(-_divide(rhs, s0, n))
        return XSeries(c, direction)
    amax = degs[-1]
    if amax == 0:
        raise IndicialObstruction(0, "operator has no positive X-degree part")
    # coefficient of E^(m - amax): sum_a S_a(q^-(m-amax+a)) c_(m-amax+a) = 0
    for m in range(1, N + 1):
        rhs = QLaurent.zero()
        base = m - amax
        for a in degs:
            if a == amax:
                continue
            j = base + a
            if 0 <= j:
                rhs = rhs + op.symbol_at_q_power(a, -j) * c[j]
        top = op.symbol_at_q_power(amax, -m)
        if top.is_zero():
            raise IndicialObstruction(m)
        c.append(-_divide(rhs, top, m))
    return XSeries(c, direction)


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------


def _closed_coeff(geom: StripGeometry, n: int, t_trunc: int, bp: Basepoint) -> QLaurent:
    f = geom.f
    t = QLaurent.t()
    e = n * n * (1 + f) + n  # t-exponent of the prefactor
    sign = -1 if (n * (f + 1)) % 2 else 1
    num = QLaurent.one()
    for a in geom.alpha_ql():
        num = (num * _poch_trunc(a * t, n, t_trunc)).truncate(t_trunc)
    den = inv_poch_finite(t, n, t_trunc)
    for b in geom.beta_ql():
        den = den * inv_poch_finite(b * t, n, t_trunc)
    val = num.truncate(t_trunc) * den
    if bp is Basepoint.ONE:
        # (q;q)_n / (q^2;q)_n = (1 - q) / (1 - q^(n+1))
        val = val * (1 - QLaurent.t(2)) * ql_inv(1 - QLaurent.t(2 * n + 2), t_trunc)
    return (val * sign).shift(e)


def _poch_trunc(u: QLaurent, n: int, trunc: int) -> QLaurent:
    out = QLaurent.one()
    for k in range(n):
        out = (out * (1 - u.shift(2 * k))).truncate(trunc)
    return out


def closed_form_psi(geom: StripGeometry, bp=Basepoint.INF, N: int = 10, t_trunc: int = 24,
                    direction=Direction.ASCENDING_X) -> XSeries:
    """Hypergeometric series solution, coefficients known to t-order val + t_trunc."""
    bp = Basepoint.parse(bp)
    direction = Direction(direction)
    if bp is Basepoint.ONE and geom.f < -1:
        raise UnsupportedFraming(f"basepoint 1 needs f >= -1, got f={geom.f}")
    if direction is Direction.ASCENDING_X_INVERSE:
        if geom.r or geom.s or geom.f != -2 or bp is not Basepoint.INF:
            raise UnsupportedFraming("the inverse-X series is available for C^3 with f=-2 at bp=inf only")
        t = QLaurent.t()
        coeffs = []
        for n in range(N + 1):
            # q^(-n^2 - n/2) (t;q)_n
            coeffs.append(_poch_trunc(t, n, t_trunc).truncate(t_trunc).shift(-2 * n * n - n))
        return XSeries(coeffs, direction)
    coeffs = [QLaurent.one().truncate(t_trunc)]
    coeffs += [_closed_coeff(geom, n, t_trunc, bp) for n in range(1, N + 1)]
    return XSeries(coeffs, direction)


# ---------------------------------------------------------------------------
# Classical limit
# ---------------------------------------------------------------------------


def classical_limit(op: QOperator) -> ClassicalCurve:
    """Set t = 1 in every coefficient; X^a sigma^b becomes X^a Y^b."""
    out = {}
    for (a, b), v in op.terms.items():
        if not v.is_exact():
            raise TruncatedCoefficient(f"coefficient of X^{a} S^{b} is truncated")
        out[(a, b)] = v.at_t_one()
    return ClassicalCurve(out)


@dataclass(frozen=True)
class LimitReport:
    limit: ClassicalCurve
    y_minus_1_factors: int
    unit: int | None  # +-1 when limit = unit * (Y-1)^k * A, else None

    @property
    def matches(self) -> bool:
        return self.unit is not None


def classical_factorization(op: QOperator, geom: StripGeometry) -> LimitReport:
    """Strip (Y-1) factors from the t -> 1 limit and compare with +-A."""
    lim = classical_limit(op)
    A = classical_curve(geom)
    k = 0
    cur = lim
    while not cur.is_zero():
        if cur == A:
            return LimitReport(lim, k, 1)
        if cur == -A:
            return LimitReport(lim, k, -1)
        quo, rem = cur.divmod_y_minus_1()
        if not rem.is_zero():
            break
        cur, k = quo, k + 1
    return LimitReport(lim, k, None)


def default_direction(geom: StripGeometry, bp=Basepoint.INF, N: int = 3) -> Direction:
    """Ascending X unless its degree-0 symbol fails; the choice is logged."""
    op = build_quantum_curve(geom, bp)
    for n in range(1, N + 1):
        s0 = op.symbol_at_q_power(0, n)
        lead = s0.leading()[1] if not s0.is_zero() else None
        if lead is None or not lead.is_constant():
            log.info("degree-0 symbol fails at n=%d; switching to inverse-X expansion", n)
            return Direction.ASCENDING_X_INVERSE
    log.info("ascending-X expansion selected for f=%d", geom.f)
    return Direction.ASCENDING_X
