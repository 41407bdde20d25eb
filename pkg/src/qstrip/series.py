"""Exact truncated Laurent series in t = q^(1/2) over Q[alpha, beta].

A ``QLaurent`` stores its terms in one flat dict keyed by a packed integer:
the high bits hold the t-exponent, the low bits the exponent vector of the
parameter monomial.  Adding two keys multiplies the monomials, and integer
comparison of keys orders terms by t-exponent first, which is what makes
truncated multiplication cheap (see ``_mul_terms``).

Parameters are named ``a1..a8`` (alpha_j) and ``b1..b8`` (beta_j).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .errors import Divergent, NotInvertible

BITS = 16
NSLOTS = 16
SHIFT = BITS * NSLOTS
MONO_MASK = (1 << SHIFT) - 1
_SLOT_MASK = (1 << BITS) - 1

Number = Union[int, Fraction]


def var_slot(name: str) -> int:
    if len(name) < 2 or name[0] not in "ab" or not name[1:].isdigit():
        raise ValueError(f"parameter name must look like a1 or b2, got {name!r}")
    j = int(name[1:])
    if not 1 <= j <= NSLOTS // 2:
        raise ValueError(f"parameter index out of range: {name!r}")
    return (j - 1) + (0 if name[0] == "a" else NSLOTS // 2)


def slot_name(slot: int) -> str:
    half = NSLOTS // 2
    return f"a{slot + 1}" if slot < half else f"b{slot - half + 1}"


def mono(name: str, power: int = 1) -> int:
    """Packed monomial ``name**power``."""
    if power < 0:
        raise ValueError("negative parameter powers are not supported")
    return power << (BITS * var_slot(name))


def mono_exponents(m: int) -> tuple[int, ...]:
    return tuple((m >> (BITS * i)) & _SLOT_MASK for i in range(NSLOTS))


def mono_degree(m: int) -> int:
    return sum(mono_exponents(m))


def mono_str(m: int) -> str:
    parts = []
    for i, e in enumerate(mono_exponents(m)):
        if e == 1:
            parts.append(slot_name(i))
        elif e:
            parts.append(f"{slot_name(i)}^{e}")
    return "*".join(parts)


def _norm(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _coeff_str(c, body: str) -> str:
    c = _norm(c)
    if not body:
        return str(c)
    if c == 1:
        return body
    if c == -1:
        return "-" + body
    return f"{c}*{body}"


# ---------------------------------------------------------------------------
# MultiPoly
# ---------------------------------------------------------------------------


class MultiPoly:
    """Sparse polynomial in the alpha/beta parameters with rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, Number] | None = None):
        self.terms = {m: _norm(c) for m, c in (terms or {}).items() if c != 0}

    @classmethod
    def const(cls, c: Number) -> "MultiPoly":
        return cls({0: c})

    @classmethod
    def var(cls, name: str) -> "MultiPoly":
        return cls({mono(name): 1})

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m == 0 for m in self.terms)

    def constant(self) -> Number:
        return self.terms.get(0, 0)

    def __add__(self, other):
        other = _as_poly(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return MultiPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        return MultiPoly(_pmul(self.terms, other.terms))

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.const(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def evaluate(self, values: Mapping[str, complex]) -> complex:
        total = 0
        for m, c in self.terms.items():
            v = complex(c) if not isinstance(c, int) else c
            for i, e in enumerate(mono_exponents(m)):
                if e:
                    v = v * values[slot_name(i)] ** e
            total += v
        return total

    def __str__(self):
        if not self.terms:
            return "0"
        items = sorted(self.terms.items())
        s = " + ".join(_coeff_str(c, mono_str(m)) for m, c in items)
        return s.replace("+ -", "- ")

    __repr__ = __str__


def _as_poly(x) -> MultiPoly:
    if isinstance(x, MultiPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return MultiPoly.const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to MultiPoly")


def _pmul(p: Mapping[int, Number], q: Mapping[int, Number]) -> dict[int, Number]:
    out: dict[int, Number] = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            k = m1 + m2
            out[k] = out.get(k, 0) + c1 * c2
    return {k: v for k, v in out.items() if v != 0}


# ---------------------------------------------------------------------------
# QLaurent
# ---------------------------------------------------------------------------


def _key(t_exp: int, m: int = 0) -> int:
    return (t_exp << SHIFT) + m


def _texp(key: int) -> int:
    return key >> SHIFT


def _mul_terms(a: Mapping[int, Number], b: Mapping[int, Number], limit: int | None):
    """Product of packed term dicts, dropping keys >= limit (a packed t-bound)."""
    if len(a) > len(b):
        a, b = b, a
    out: dict[int, Number] = {}
    get = out.get
    if limit is None:
        for ka, ca in a.items():
            for kb, cb in b.items():
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
    else:
        bs = sorted(b.items())
        for ka, ca in a.items():
            lim = limit - ka
            for kb, cb in bs:
                if kb >= lim:
                    break
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
    return {k: (v.numerator if type(v) is Fraction and v.denominator == 1 else v)
            for k, v in out.items() if v != 0}


class QLaurent:
    """Truncated Laurent series in t with MultiPoly coefficients.

    ``trunc=None`` means the value is an exact Laurent polynomial; otherwise
    every exponent >= ``trunc`` is unknown.
    """

    __slots__ = ("_terms", "trunc")

    def __init__(self, terms: Mapping[int, Number] | None = None, trunc: int | None = None):
        # ``terms`` is the packed representation; use the classmethods for
        # anything built by hand.
        if trunc is None:
            self._terms = {k: _norm(c) for k, c in (terms or {}).items() if c != 0}
        else:
            bound = _key(trunc)
            self._terms = {k: _norm(c) for k, c in (terms or {}).items() if c != 0 and k < bound}
        self.trunc = trunc

    @classmethod
    def _make(cls, terms: dict, trunc: int | None) -> "QLaurent":
        # terms already normalized, nonzero and below trunc
        obj = object.__new__(cls)
        obj._terms = terms
        obj.trunc = trunc
        return obj

    # -- construction -----------------------------------------------------

    @classmethod
    def from_levels(cls, levels: Mapping[int, Union[MultiPoly, Number]], trunc: int | None = None):
        raw: dict[int, Number] = {}
        for k, p in levels.items():
            p = _as_poly(p)
            for m, c in p.terms.items():
                raw[_key(k, m)] = c
        return cls(raw, trunc)

    @classmethod
    def monomial(cls, coeff: Number = 1, t_exp: int = 0, m: int = 0, trunc: int | None = None):
        return cls({_key(t_exp, m): coeff}, trunc)

    @classmethod
    def one(cls):
        return cls({0: 1})

    @classmethod
    def zero(cls, trunc: int | None = None):
        return cls({}, trunc)

    @classmethod
    def t(cls, k: int = 1):
        return cls({_key(k): 1})

    @classmethod
    def param(cls, name: str, t_exp: int = 0):
        return cls({_key(t_exp, mono(name)): 1})

    # -- inspection -------------------------------------------------------

    @property
    def raw(self) -> Mapping[int, Number]:
        return self._terms

    @property
    def terms(self) -> dict[int, MultiPoly]:
        levels: dict[int, dict[int, Number]] = {}
        for k, c in self._terms.items():
            levels.setdefault(_texp(k), {})[k & MONO_MASK] = c
        return {k: MultiPoly(v) for k, v in sorted(levels.items())}

    def coefficient(self, t_exp: int) -> MultiPoly:
        if self.trunc is not None and t_exp >= self.trunc:
            raise IndexError(f"t^{t_exp} lies beyond the truncation t^{self.trunc}")
        lo, hi = _key(t_exp), _key(t_exp + 1)
        return MultiPoly({k & MONO_MASK: c for k, c in self._terms.items() if lo <= k < hi})

    def is_exact(self) -> bool:
        return self.trunc is None

    def is_zero(self) -> bool:
        """True when every known coefficient vanishes."""
        return not self._terms

    def valuation(self) -> float:
        """Lowest t-exponent present; ``trunc`` for a truncated zero, inf for exact zero."""
        if self._terms:
            return _texp(min(self._terms))
        return math.inf if self.trunc is None else self.trunc

    def degree(self) -> float:
        if self._terms:
            return _texp(max(self._terms))
        return -math.inf

    def leading(self) -> tuple[int, MultiPoly]:
        v = self.valuation()
        if not self._terms:
            raise ValueError("zero series has no leading term")
        return v, self.coefficient(v)

    def max_param_degree(self) -> int:
        return max((mono_degree(k & MONO_MASK) for k in self._terms), default=0)

    def __len__(self):
        return len(self._terms)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "QLaurent":
        if isinstance(other, QLaurent):
            return other
        if isinstance(other, (int, Fraction)):
            return QLaurent({0: other})
        if isinstance(other, MultiPoly):
            return QLaurent.from_levels({0: other})
        raise TypeError(f"cannot coerce {type(other).__name__} to QLaurent")

    def __add__(self, other):
        other = self._coerce(other)
        trunc = _min_trunc(self.trunc, other.trunc)
        out = dict(self._terms)
        get = out.get
        for k, c in other._terms.items():
            out[k] = get(k, 0) + c
        bound = None if trunc is None else _key(trunc)
        return QLaurent._make({k: (v.numerator if type(v) is Fraction and v.denominator == 1 else v)
                               for k, v in out.items() if v != 0 and (bound is None or k < bound)}, trunc)

    __radd__ = __add__

    def __neg__(self):
        return QLaurent({k: -c for k, c in self._terms.items()}, self.trunc)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return QLaurent({}, None if self.trunc is None else self.trunc)
            return QLaurent({k: c * other for k, c in self._terms.items()}, self.trunc)
        other = self._coerce(other)
        if (not self._terms and self.trunc is None) or (not other._terms and other.trunc is None):
            return QLaurent()
        trunc = None
        if self.trunc is not None:
            trunc = self.trunc + other.valuation()
        if other.trunc is not None:
            trunc = _min_trunc(trunc, other.trunc + self.valuation())
        limit = None if trunc is None else _key(trunc)
        return QLaurent._make(_mul_terms(self._terms, other._terms, limit), trunc)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("use ql_inv for negative powers")
        out = QLaurent.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def shift(self, k: int) -> "QLaurent":
        """Multiply by t**k."""
        off = k << SHIFT
        return QLaurent({key + off: c for key, c in self._terms.items()},
                        None if self.trunc is None else self.trunc + k)

    def mul_mono(self, m: int) -> "QLaurent":
        return QLaurent({key + m: c for key, c in self._terms.items()}, self.trunc)

    def truncate(self, trunc: int | None) -> "QLaurent":
        if trunc is None:
            return self
        return QLaurent(self._terms, _min_trunc(self.trunc, trunc))

    def scale_t(self, r: int) -> "QLaurent":
        """Substitute t -> t**r (r >= 1)."""
        if r < 1:
            raise ValueError("scale_t needs r >= 1")
        out = {}
        for k, c in self._terms.items():
            out[_key(_texp(k) * r, k & MONO_MASK)] = c
        return QLaurent(out, None if self.trunc is None else self.trunc * r)

    # -- comparison -------------------------------------------------------

    def __eq__(self, other):
        """Structural equality: same known terms and same truncation."""
        if isinstance(other, (int, Fraction, MultiPoly)):
            other = self._coerce(other)
        if not isinstance(other, QLaurent):
            return NotImplemented
        return self.trunc == other.trunc and self._terms == other._terms

    def __hash__(self):
        return hash((self.trunc, frozenset(self._terms.items())))

    def agrees(self, other) -> bool:
        """Equality to the shared truncation order."""
        return (self - self._coerce(other)).is_zero()

    def agreement_order(self, other) -> float:
        """Lowest exponent at which the two differ (or the shared trunc)."""
        return (self - self._coerce(other)).valuation()

    # -- evaluation -------------------------------------------------------

    def at_t_one(self) -> MultiPoly:
        if self.trunc is not None:
            from .errors import TruncatedCoefficient
            raise TruncatedCoefficient("t -> 1 needs an exact coefficient")
        out: dict[int, Number] = {}
        for k, c in self._terms.items():
            m = k & MONO_MASK
            out[m] = out.get(m, 0) + c
        return MultiPoly(out)

    def evaluate(self, t: complex, values: Mapping[str, complex] | None = None) -> complex:
        values = values or {}
        total = 0j
        for k, c in self._terms.items():
            v = complex(c) * t ** _texp(k)
            for i, e in enumerate(mono_exponents(k & MONO_MASK)):
                if e:
                    v *= values[slot_name(i)] ** e
            total += v
        return total

    def poly_str(self) -> str:
        """The known terms only, sorted by t-exponent then monomial."""
        if not self._terms:
            return "0"
        parts = []
        for k, c in sorted(self._terms.items()):
            e, m = _texp(k), k & MONO_MASK
            tb = "" if e == 0 else ("t" if e == 1 else f"t^{e}")
            b = "*".join(x for x in (mono_str(m), tb) if x)
            parts.append(_coeff_str(c, b))
        return " + ".join(parts).replace("+ -", "- ")

    def __str__(self):
        body = self.poly_str()
        if self.trunc is None:
            return body
        if not self._terms:
            return f"O(t^{self.trunc})"
        return f"{body} + O(t^{self.trunc})"

    def __repr__(self):
        return f"QLaurent({self})"


def _min_trunc(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def ql_mul(a: QLaurent, b: QLaurent) -> QLaurent:
    return a * b


def _levels(a: QLaurent) -> dict[int, dict[int, Number]]:
    levels: dict[int, dict[int, Number]] = {}
    for k, c in a.raw.items():
        levels.setdefault(_texp(k), {})[k & MONO_MASK] = c
    return levels


def ql_inv(a: QLaurent, trunc: int) -> QLaurent:
    """Inverse of ``a`` with exponents below ``trunc`` (capped by a's own precision)."""
    if a.is_zero():
        raise NotInvertible("zero has no inverse")
    v = int(a.valuation())
    lead = a.coefficient(v)
    if not lead.is_constant():
        raise NotInvertible(f"leading coefficient {lead} involves parameters")
    c = lead.constant()
    levels = _levels(a)
    # result exponents are -v + m, m = 0 .. M-1
    M = trunc + v
    if a.trunc is not None:
        M = min(M, a.trunc - v)
    if M <= 0:
        return QLaurent.zero(-v + max(M, 0))
    inv_c = Fraction(1, 1) / c if c not in (1, -1) else c
    rel = {j - v: p for j, p in levels.items() if j > v}
    b: list[dict[int, Number]] = [{0: inv_c}]
    for m in range(1, M):
        acc: dict[int, Number] = {}
        for j, p in rel.items():
            if j > m:
                continue
            prev = b[m - j]
            if not prev:
                continue
            for m1, c1 in p.items():
                for m2, c2 in prev.items():
                    key = m1 + m2
                    acc[key] = acc.get(key, 0) + c1 * c2
        b.append({k: -x * inv_c for k, x in acc.items() if x != 0})
    raw = {}
    for m, p in enumerate(b):
        for mono_, coeff in p.items():
            raw[_key(m - v, mono_)] = coeff
    return QLaurent(raw, -v + M)


def geometric(u: QLaurent, trunc: int) -> QLaurent:
    """1/(1-u) for a single-term u of positive t-order, below ``trunc``."""
    if len(u) != 1 or not u.is_exact():
        return ql_inv(1 - u, trunc)
    (k, c), = u.raw.items()
    p = _texp(k)
    if p <= 0:
        return ql_inv(1 - u, trunc)
    raw = {}
    j = 0
    key, coeff = 0, 1
    while (j * p) < trunc:
        raw[key] = coeff
        key += k
        coeff *= c
        j += 1
    return QLaurent(raw, trunc)


def _as_monomial(u) -> QLaurent:
    if isinstance(u, QLaurent):
        if len(u) != 1 or not u.is_exact():
            raise ValueError("Pochhammer argument must be a single exact monomial")
        return u
    return QLaurent.one()._coerce(u)


def poch_finite(u, n: int) -> QLaurent:
    """(u;q)_n = prod_{k<n} (1 - u q^k), exact."""
    if n < 0:
        raise ValueError("n must be >= 0")
    u = _as_monomial(u)
    out = QLaurent.one()
    for k in range(n):
        out = out * (1 - u.shift(2 * k))
    return out


def inv_poch_finite(u, n: int, trunc: int) -> QLaurent:
    """1/(u;q)_n below ``trunc``; factors with t-order <= 0 go through ql_inv."""
    u = _as_monomial(u)
    out = QLaurent.one()
    for k in range(n):
        out = out * geometric(u.shift(2 * k), trunc - min(0, int(out.valuation())))
    return out.truncate(trunc) if out.trunc is None else out


def poch_inf(u, trunc: int) -> QLaurent:
    """(u;q)_inf truncated below ``trunc``; u needs positive t-order."""
    u = _as_monomial(u)
    p = int(u.valuation())
    if p <= 0:
        raise Divergent(f"(u;q)_inf does not converge t-adically for t-order {p}")
    out = QLaurent.one()
    k = 0
    while p + 2 * k < trunc:
        out = out * (1 - u.shift(2 * k))
        k += 1
    return out.truncate(trunc)


def inv_poch_inf(u, trunc: int) -> QLaurent:
    u = _as_monomial(u)
    p = int(u.valuation())
    if p <= 0:
        raise Divergent(f"1/(u;q)_inf does not converge t-adically for t-order {p}")
    out = QLaurent.one().truncate(trunc)
    k = 0
    while p + 2 * k < trunc:
        out = out * geometric(u.shift(2 * k), trunc)
        k += 1
    return out


def q_pow(e: Union[int, Fraction]) -> QLaurent:
    """q**e for half-integer e."""
    two = Fraction(e) * 2
    if two.denominator != 1:
        raise ValueError(f"q-exponent {e} is not a half-integer")
    return QLaurent.t(int(two))


# ---------------------------------------------------------------------------
# XSeries
# ---------------------------------------------------------------------------


class Direction(enum.Enum):
    ASCENDING_X = "ascending_x"
    ASCENDING_X_INVERSE = "ascending_x_inverse"


@dataclass(frozen=True)
class XSeries:
    """Truncated series sum_n coeffs[n - start] * E^n with E = X or 1/X.

    Degrees above ``N`` are unknown; each coefficient carries its own t-truncation.
    """

    coeffs: tuple[QLaurent, ...]
    direction: Direction = Direction.ASCENDING_X
    start: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @property
    def N(self) -> int:
        return self.start + len(self.coeffs) - 1

    def __getitem__(self, n: int) -> QLaurent:
        if n < self.start:
            return QLaurent.zero()
        if n > self.N:
            raise IndexError(f"E^{n} lies beyond the truncation order {self.N}")
        return self.coeffs[n - self.start]

    def degrees(self) -> range:
        return range(self.start, self.N + 1)

    def _check(self, other: "XSeries"):
        if self.direction != other.direction:
            from .errors import DirectionMismatch
            raise DirectionMismatch(f"{self.direction.value} vs {other.direction.value}")

    def __add__(self, other: "XSeries") -> "XSeries":
        self._check(other)
        lo, hi = min(self.start, other.start), min(self.N, other.N)
        return XSeries([self[n] + other[n] for n in range(lo, hi + 1)], self.direction, lo)

    def __neg__(self):
        return XSeries([-c for c in self.coeffs], self.direction, self.start)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, QLaurent)):
            return XSeries([c * other for c in self.coeffs], self.direction, self.start)
        self._check(other)
        lo = self.start + other.start
        hi = min(self.N + other.start, other.N + self.start)
        out = []
        for n in range(lo, hi + 1):
            acc = QLaurent.zero()
            for i in range(self.start, n - other.start + 1):
                acc = acc + self[i] * other[n - i]
            out.append(acc)
        return XSeries(out, self.direction, lo)

    def truncate(self, N: int) -> "XSeries":
        return XSeries(self.coeffs[: max(0, N - self.start + 1)], self.direction, self.start)

    def agrees(self, other: "XSeries") -> bool:
        self._check(other)
        return all(c.is_zero() for c in (self - other).coeffs)

    def first_disagreement(self, other: "XSeries"):
        """(degree, t-order) of the first mismatch, or None."""
        self._check(other)
        diff = self - other
        for n in diff.degrees():
            if not diff[n].is_zero():
                return n, diff[n].valuation()
        return None

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def min_trunc(self) -> float:
        return min((c.trunc for c in self.coeffs if c.trunc is not None), default=math.inf)

    @classmethod
    def one(cls, N: int, trunc: int | None = None, direction: Direction = Direction.ASCENDING_X):
        zero = QLaurent.zero(trunc)
        return cls([QLaurent.one().truncate(trunc)] + [zero] * N, direction)

    def __str__(self):
        var = "X" if self.direction is Direction.ASCENDING_X else "X^-1"
        rows = [f"[{var}^{n}] {self[n]}" for n in self.degrees()]
        return "\n".join(rows)


def euler_series(w: QLaurent, N: int, trunc: int) -> list[QLaurent]:
    """Coefficients w^n / (q;q)_n for n = 0..N (the Euler-type Nahm terms)."""
    out = []
    wn = QLaurent.one()
    for n in range(N + 1):
        out.append(wn * inv_poch_finite(QLaurent.t(2), n, trunc))
        wn = wn * w
    return out


def series_sum(items: Iterable[QLaurent]) -> QLaurent:
    acc = QLaurent.zero()
    for x in items:
        acc = acc + x
    return acc


def parse_params(names: Sequence[str]) -> list[QLaurent]:
    return [QLaurent.param(n) for n in names]
