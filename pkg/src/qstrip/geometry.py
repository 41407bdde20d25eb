"""Strip geometries, their classical mirror curve, parametrization and saddle potential."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Number as _Num
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from .errors import ConfigInvalid, NoConvergence, PoleAtZ
from .polylog import li2
from .series import MultiPoly, QLaurent, var_slot

Param = Union[str, int, Fraction, float, complex]


def _is_symbol(p) -> bool:
    return isinstance(p, str)


@dataclass(frozen=True)
class StripGeometry:
    """Strip geometry with parameters alpha_j, beta_j and framing f.

    Parameters are either all symbolic (strings ``"a1"``, ``"b2"``) or all
    numeric.  Exact rationals are usable in the exact engine as well.
    """

    alphas: tuple = ()
    betas: tuple = ()
    f: int = 0

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(self.alphas))
        object.__setattr__(self, "betas", tuple(self.betas))
        if isinstance(self.f, bool) or not isinstance(self.f, int):
            raise ConfigInvalid(f"framing must be an integer, got {self.f!r}")
        params = self.alphas + self.betas
        kinds = {_is_symbol(p) for p in params}
        if len(kinds) > 1:
            raise ConfigInvalid("mixed symbolic and numeric parameters are not supported")
        for name, group, letter in (("alphas", self.alphas, "a"), ("betas", self.betas, "b")):
            for p in group:
                if _is_symbol(p):
                    try:
                        var_slot(p)
                    except ValueError as exc:
                        raise ConfigInvalid(str(exc)) from None
                    if p[0] != letter:
                        raise ConfigInvalid(f"{name} entry {p!r} should start with {letter!r}")
                elif not isinstance(p, _Num) or isinstance(p, bool):
                    raise ConfigInvalid(f"bad parameter {p!r} in {name}")
        if len(set(p for p in params if _is_symbol(p))) != sum(_is_symbol(p) for p in params):
            raise ConfigInvalid("repeated symbolic parameter")

    @property
    def r(self) -> int:
        return len(self.alphas)

    @property
    def s(self) -> int:
        return len(self.betas)

    @property
    def symbolic(self) -> bool:
        return any(_is_symbol(p) for p in self.alphas + self.betas)

    @property
    def numeric(self) -> bool:
        return not self.symbolic

    @property
    def exact(self) -> bool:
        return all(_is_symbol(p) or isinstance(p, (int, Fraction)) for p in self.alphas + self.betas)

    def with_framing(self, f: int) -> "StripGeometry":
        return StripGeometry(self.alphas, self.betas, f)

    @classmethod
    def generic(cls, r: int, s: int, f: int) -> "StripGeometry":
        return cls(tuple(f"a{j + 1}" for j in range(r)), tuple(f"b{j + 1}" for j in range(s)), f)

    @classmethod
    def c3(cls, f: int) -> "StripGeometry":
        return cls((), (), f)

    @classmethod
    def conifold(cls, f: int, alpha: Param = "a1") -> "StripGeometry":
        return cls((alpha,), (), f)

    # exact views ------------------------------------------------------------

    def _ql(self, p) -> QLaurent:
        if _is_symbol(p):
            return QLaurent.param(p)
        if isinstance(p, (int, Fraction)):
            return QLaurent.monomial(p)
        raise ConfigInvalid(f"parameter {p!r} is not exact; use a symbol or a rational")

    def alpha_ql(self) -> list[QLaurent]:
        return [self._ql(p) for p in self.alphas]

    def beta_ql(self) -> list[QLaurent]:
        return [self._ql(p) for p in self.betas]

    def alpha_c(self) -> list[complex]:
        return [_numval(p) for p in self.alphas]

    def beta_c(self) -> list[complex]:
        return [_numval(p) for p in self.betas]

    def label(self) -> str:
        if self.r == 0 and self.s == 0:
            return "c3"
        if self.r == 1 and self.s == 0:
            return "conifold"
        return f"strip_r{self.r}_s{self.s}"


def _numval(p) -> complex:
    if _is_symbol(p):
        raise ConfigInvalid(f"symbolic parameter {p!r} where a number is required")
    return complex(p)


def _poly_of(p) -> MultiPoly:
    if _is_symbol(p):
        return MultiPoly.var(p)
    return MultiPoly({0: p})


# ---------------------------------------------------------------------------
# Classical curve
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassicalCurve:
    """Bivariate Laurent polynomial sum c_ij X^i Y^j with MultiPoly coefficients."""

    terms: Mapping[tuple[int, int], MultiPoly] = field(default_factory=dict)

    def __post_init__(self):
        clean = {k: v for k, v in self.terms.items() if not v.is_zero()}
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    def __add__(self, other: "ClassicalCurve") -> "ClassicalCurve":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return ClassicalCurve(out)

    def __neg__(self):
        return ClassicalCurve({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, ClassicalCurve):
            c = other if isinstance(other, MultiPoly) else MultiPoly.const(other)
            return ClassicalCurve({k: v * c for k, v in self.terms.items()})
        out: dict[tuple[int, int], MultiPoly] = {}
        for (i1, j1), v1 in self.terms.items():
            for (i2, j2), v2 in other.terms.items():
                k = (i1 + i2, j1 + j2)
                out[k] = out[k] + v1 * v2 if k in out else v1 * v2
        return ClassicalCurve(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, ClassicalCurve):
            return NotImplemented
        return self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    @classmethod
    def monomial(cls, i: int, j: int, c=1) -> "ClassicalCurve":
        return cls({(i, j): c if isinstance(c, MultiPoly) else MultiPoly.const(c)})

    def x_degree(self) -> int:
        return max((i for i, _ in self.terms), default=0)

    def y_range(self) -> tuple[int, int]:
        js = [j for _, j in self.terms]
        return (min(js), max(js)) if js else (0, 0)

    def coeff_in_x(self, i: int) -> dict[int, MultiPoly]:
        return {j: v for (a, j), v in self.terms.items() if a == i}

    def evaluate(self, X: complex, Y: complex, values: Mapping[str, complex] | None = None) -> complex:
        values = values or {}
        return sum(v.evaluate(values) * X ** i * Y ** j for (i, j), v in self.terms.items())

    def divmod_y_minus_1(self) -> tuple["ClassicalCurve", "ClassicalCurve"]:
        """Divide by (Y - 1) in Y for each X-power; returns (quotient, remainder)."""
        quot: dict[tuple[int, int], MultiPoly] = {}
        rem: dict[tuple[int, int], MultiPoly] = {}
        for i in sorted({i for i, _ in self.terms}):
            row = self.coeff_in_x(i)
            lo, hi = min(row), max(row)
            # synthetic division from the top
            carry = MultiPoly()
            for j in range(hi, lo - 1, -1):
                carry = carry + row.get(j, MultiPoly())
                if j > lo:
                    quot[(i, j - 1)] = carry
                else:
                    rem[(i, lo)] = carry
        return ClassicalCurve(quot), ClassicalCurve(rem)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (i, j), v in self.terms.items():
            mon = "*".join(
                s for s in (
                    "" if i == 0 else ("X" if i == 1 else f"X^{i}"),
                    "" if j == 0 else ("Y" if j == 1 else f"Y^{j}"),
                ) if s
            )
            cs = str(v)
            if len(v.terms) > 1:
                cs = f"({cs})"
            if not mon:
                parts.append(cs)
            elif cs == "1":
                parts.append(mon)
            elif cs == "-1":
                parts.append("-" + mon)
            else:
                parts.append(f"{cs}*{mon}")
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


def _y_product(params, sign_y: int = 1) -> ClassicalCurve:
    """prod_j (1 - p_j Y)."""
    out = ClassicalCurve.monomial(0, 0)
    for p in params:
        out = out * ClassicalCurve({(0, 0): MultiPoly.const(1), (0, 1): -_poly_of(p)})
    return out


def classical_curve(geom: StripGeometry) -> ClassicalCurve:
    """A(X, Y) = (1 - Y) prod(1 - b_j Y) + (-1)^f X Y^(1+f) prod(1 - a_j Y)."""
    one_minus_y = ClassicalCurve({(0, 0): MultiPoly.const(1), (0, 1): MultiPoly.const(-1)})
    first = one_minus_y * _y_product(geom.betas)
    sign = -1 if geom.f % 2 else 1
    second = ClassicalCurve.monomial(1, 1 + geom.f, sign) * _y_product(geom.alphas)
    return first + second


def curve_eval(geom: StripGeometry, X: complex, Y: complex) -> complex:
    a, b = geom.alpha_c(), geom.beta_c()
    pb = math.prod((1 - bj * Y for bj in b), start=1 + 0j)
    pa = math.prod((1 - aj * Y for aj in a), start=1 + 0j)
    return (1 - Y) * pb + (-1) ** geom.f * X * Y ** (1 + geom.f) * pa


def _excluded_z(geom: StripGeometry, z: complex, tol: float = 1e-14):
    if abs(z) < tol:
        raise PoleAtZ("z = 0")
    if abs(z - 1) < tol:
        raise PoleAtZ("z = 1")
    for p in geom.alpha_c() + geom.beta_c():
        if p != 0 and abs(z - 1 / p) < tol:
            raise PoleAtZ(f"z = 1/{p}")


def parametrize(geom: StripGeometry, z: complex) -> tuple[complex, complex]:
    """Point (x, y) on the curve with Y = z."""
    z = complex(z)
    _excluded_z(geom, z)
    a, b = geom.alpha_c(), geom.beta_c()
    ratio = (1 - z) * math.prod((1 - bj * z for bj in b), start=1 + 0j)
    ratio /= math.prod((1 - aj * z for aj in a), start=1 + 0j)
    if ratio == 0:
        raise PoleAtZ(f"log of zero at z = {z}")
    f1 = geom.f + 1
    x = cmath.log(ratio) - f1 * cmath.log(z) + f1 * 1j * math.pi
    return x, cmath.log(z)


# ---------------------------------------------------------------------------
# Saddle potential
# ---------------------------------------------------------------------------


@dataclass
class SaddleResult:
    x: complex
    W: Callable[[complex], complex]
    dW: Callable[[complex], complex]  # z dW/dz
    critical_points: list[complex]
    collision: bool

    def curve_residuals(self, geom: StripGeometry) -> list[float]:
        X = cmath.exp(self.x)
        return [abs(curve_eval(geom, X, 1 / z)) for z in self.critical_points]


def _potential(geom: StripGeometry, x: complex):
    a, b, f = geom.alpha_c(), geom.beta_c(), geom.f
    shift = x - 1j * math.pi * f

    def W(z: complex) -> complex:
        lz = cmath.log(z)
        val = -li2(z) + sum(li2(bj / z) for bj in b) - sum(li2(aj / z) for aj in a)
        return val + 0.5 * f * lz * lz - shift * lz

    def zdW(z: complex) -> complex:
        val = cmath.log(1 - z) + sum(cmath.log(1 - bj / z) for bj in b)
        val -= sum(cmath.log(1 - aj / z) for aj in a)
        return val + f * cmath.log(z) - shift

    return W, zdW


def _crit_residual(geom: StripGeometry, x: complex, z: complex) -> complex:
    """exp(z W'(z)) - 1 written without logs."""
    a, b, f = geom.alpha_c(), geom.beta_c(), geom.f
    num = (1 - z) * math.prod((1 - bj / z for bj in b), start=1 + 0j) * z ** f * (-1) ** f
    den = cmath.exp(x) * math.prod((1 - aj / z for aj in a), start=1 + 0j)
    return num - den


def _curve_y_roots(geom: StripGeometry, X: complex) -> list[complex]:
    curve = classical_curve(geom)
    lo, hi = curve.y_range()
    coeffs = [0j] * (hi - lo + 1)
    for (i, j), v in curve.terms.items():
        coeffs[j - lo] += v.evaluate({}) * X ** i
    poly = list(reversed(coeffs))
    while poly and abs(poly[0]) == 0:
        poly.pop(0)
    roots = np.roots(np.array(poly, dtype=complex)) if len(poly) > 1 else []
    return [complex(r) for r in roots if abs(r) > 1e-300]


def saddle_potential(geom: StripGeometry, x: complex, *, max_iter: int = 60,
                     tol: float = 1e-13, collision_tol: float = 1e-6) -> SaddleResult:
    """Potential W(z) and its critical points z_c (with Y = 1/z on the curve)."""
    if geom.symbolic:
        raise ConfigInvalid("saddle_potential needs numeric parameters")
    x = complex(x)
    W, zdW = _potential(geom, x)
    crit = []
    for Y in _curve_y_roots(geom, cmath.exp(x)):
        z = 1 / Y
        for _ in range(max_iter):
            g = _crit_residual(geom, x, z)
            h = 1e-7 * max(1.0, abs(z))
            dg = (_crit_residual(geom, x, z + h) - _crit_residual(geom, x, z - h)) / (2 * h)
            if dg == 0:
                break
            step = g / dg
            z -= step
            if abs(step) <= tol * max(1.0, abs(z)):
                break
        else:
            raise NoConvergence(f"root polishing did not converge near z = {1 / Y}")
        crit.append(z)
    collision = any(
        abs(crit[i] - crit[j]) < collision_tol * max(1.0, abs(crit[i]))
        for i in range(len(crit)) for j in range(i + 1, len(crit))
    )
    return SaddleResult(x, W, zdW, crit, collision)
