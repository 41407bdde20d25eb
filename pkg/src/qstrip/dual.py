"""Dual wave function in Y = e^y: its difference equation and hbar-expansion."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .errors import ConfigInvalid, ConvergenceDomain, ResidualNonzero
from .geometry import StripGeometry
from .polylog import bernoulli, bernoulli_poly, polylog
from .series import QLaurent, XSeries, inv_poch_finite, poch_finite


@dataclass(frozen=True)
class DualWave:
    """sqrt(z) * prod(z u;q)_inf / prod(z v;q)_inf * exp(gauss log^2 z / hbar + phase i pi log z / hbar).

    ``numerator`` and ``denominator`` hold the z-free parts u, v of the
    Pochhammer arguments.
    """

    geom: StripGeometry
    numerator: tuple[QLaurent, ...]
    denominator: tuple[QLaurent, ...]
    sqrt_z: bool = True
    gauss: Fraction = Fraction(0)  # coefficient of log(z)^2 / hbar
    phase: int = 0  # coefficient of i*pi*log(z) / hbar
    z_trunc: int = 10

    def pochhammer_series(self, t_trunc: int = 24, z_scale: int = 0) -> XSeries:
        """Pochhammer part at z -> z t^z_scale as a series in z (ascending)."""
        N = self.z_trunc
        out = _unit_zseries(N, t_trunc)
        for u in self.numerator:
            out = out * _poch_inf_z(u, N, t_trunc, inverse=False)
        for v in self.denominator:
            out = out * _poch_inf_z(v, N, t_trunc, inverse=True)
        return XSeries([c.shift(z_scale * n) for n, c in zip(out.degrees(), out.coeffs)], out.direction)


def _unit_zseries(N: int, t_trunc: int) -> XSeries:
    return XSeries([QLaurent.one()] + [QLaurent.zero()] * N)


def _poch_inf_z(u: QLaurent, N: int, t_trunc: int, inverse: bool) -> XSeries:
    """(z u;q)_inf or its inverse as a z-series, via the q-binomial sums."""
    coeffs = []
    un = QLaurent.one()
    for n in range(N + 1):
        inv_qq = inv_poch_finite(QLaurent.t(2), n, t_trunc)
        if inverse:
            c = un * inv_qq
        else:
            c = (un * inv_qq).shift(n * (n - 1)) * (-1 if n % 2 else 1)
        coeffs.append(c)
        un = un * u
    return XSeries(coeffs)


def dual_wave(geom: StripGeometry, z_trunc: int = 10) -> DualWave:
    t = QLaurent.t()
    num = tuple(a * t for a in geom.alpha_ql())
    den = (t,) + tuple(b * t for b in geom.beta_ql())
    return DualWave(geom, num, den, True, Fraction(-(1 + geom.f), 2), geom.f + 1, z_trunc)


# exact bookkeeping of the log-prefactor ---------------------------------------
# A term is keyed by (power of y, power of hbar, power of i*pi).

LogPoly = dict


def _lp_add(a: LogPoly, b: LogPoly, sign: int = 1) -> LogPoly:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + sign * v
    return {k: v for k, v in out.items() if v != 0}


def _prefactor_log(dw: DualWave) -> LogPoly:
    out: LogPoly = {}
    if dw.sqrt_z:
        out[(1, 0, 0)] = Fraction(1, 2)
    if dw.gauss:
        out[(2, -1, 0)] = dw.gauss
    if dw.phase:
        out[(1, -1, 1)] = Fraction(dw.phase)
    return out


def _shift_y(p: LogPoly, sign: int) -> LogPoly:
    """Substitute y -> y + sign*hbar/2."""
    out: LogPoly = {}
    for (ey, eh, ep), c in p.items():
        for k in range(ey + 1):
            coeff = c * math.comb(ey, k) * Fraction(sign, 2) ** k
            key = (ey - k, eh + k, ep)
            out[key] = out.get(key, 0) + coeff
    return {k: v for k, v in out.items() if v != 0}


def prefactor_difference(dw: DualWave) -> LogPoly:
    p = _prefactor_log(dw)
    return _lp_add(_shift_y(p, 1), _shift_y(p, -1), -1)


def prefactor_target(dw: DualWave) -> LogPoly:
    """log of hbar-free factor e^(hbar/2) e^(-(1+f) y) / (-1)^(f+1)."""
    f = dw.geom.f
    return {(0, 1, 0): Fraction(1, 2), (1, 0, 0): Fraction(-(1 + f)), (0, 0, 1): Fraction(-(f + 1))}


def _mod_2pi_i(diff: LogPoly) -> bool:
    """True when diff is an integer multiple of 2 pi i."""
    rest = {k: v for k, v in diff.items() if k != (0, 0, 1)}
    c = diff.get((0, 0, 1), 0)
    return not rest and Fraction(c) % 2 == 0


@dataclass
class DualCheck:
    prefactor_ok: bool
    prefactor_difference: LogPoly
    residual: XSeries

    @property
    def ok(self) -> bool:
        return self.prefactor_ok and self.residual.is_zero()


def verify_dual_difference(dw: DualWave, t_trunc: int = 24, raise_on_failure: bool = False) -> DualCheck:
    """Check psi(y + hbar/2) = e^(hbar/2) (1-Y)prod(1-b Y) / ((-1)^(f+1) Y^(1+f) prod(1-a Y)) psi(y - hbar/2).

    The exponential prefactor is compared as exact data in (y, hbar, i pi); the
    Pochhammer part as P(t z) prod(1 - a z) - (1 - z) prod(1 - b z) P(z / t) in z.
    """
    diff = _lp_add(prefactor_difference(dw), prefactor_target(dw), -1)
    pref_ok = _mod_2pi_i(diff)
    up = dw.pochhammer_series(t_trunc, 1)
    down = dw.pochhammer_series(t_trunc, -1)
    N = dw.z_trunc

    def linear(params) -> XSeries:
        out = _unit_zseries(N, None)
        for p in params:
            out = out * XSeries([QLaurent.one(), -p] + [QLaurent.zero()] * (N - 1))
        return out

    lhs = up * linear([a for a in dw.geom.alpha_ql()])
    rhs = down * linear([QLaurent.one()] + dw.geom.beta_ql())
    residual = lhs - rhs
    check = DualCheck(pref_ok, diff, residual)
    if raise_on_failure and not check.ok:
        where = "prefactor"
        for n in residual.degrees():
            if not residual[n].is_zero():
                where = (n, residual[n].valuation())
                break
        raise ResidualNonzero(where)
    return check


# ---------------------------------------------------------------------------
# hbar expansion
# ---------------------------------------------------------------------------


@dataclass
class HbarExpansion:
    """log psi^vee as sum_p hbar^p * orders[p], p = -1 .. G."""

    geom: StripGeometry
    G: int
    orders: dict[int, Callable[[complex], complex]] = field(default_factory=dict)
    weights: dict[int, Fraction] = field(default_factory=dict)  # Li_{1-p} weight

    def evaluate(self, z: complex, hbar: float, framing: bool = False) -> complex:
        total = sum(hbar ** p * fn(z) for p, fn in self.orders.items())
        if framing:
            lz = cmath.log(z)
            f = self.geom.f
            total += -(1 + f) / (2 * hbar) * lz * lz + (f + 1) * 1j * math.pi * lz / hbar + 0.5 * lz
        return total


def shifted_weights(G: int) -> dict[int, Fraction]:
    """Weight of Li_{1-p} at hbar^p from (1/hbar) sum B_n/n! hbar^n Li_{2-n}(z e^{hbar/2})."""
    out: dict[int, Fraction] = {}
    for p in range(-1, G + 1):
        m = p + 1  # total order n + k
        w = Fraction(0)
        for n in range(m + 1):
            k = m - n
            w += bernoulli(n) / math.factorial(n) * Fraction(1, 2) ** k / math.factorial(k)
        out[p] = w
    return out


def omega_dual_expansion(geom: StripGeometry, G: int = 4) -> HbarExpansion:
    if geom.symbolic:
        raise ConfigInvalid("the hbar expansion is numeric; give numeric parameters")
    weights = shifted_weights(G)
    a, b = geom.alpha_c(), geom.beta_c()

    def layer(p: int) -> Callable[[complex], complex]:
        w = float(weights[p])
        s = 1 - p

        def fn(z: complex) -> complex:
            val = polylog(s, z) + sum(polylog(s, bj * z) for bj in b) - sum(polylog(s, aj * z) for aj in a)
            return -w * val

        return fn

    orders = {p: layer(p) for p in range(-1, G + 1) if weights[p] != 0}
    return HbarExpansion(geom, G, orders, weights)


def log_poch_numeric(u: complex, q: float, tol: float = 1e-18, max_terms: int = 200000) -> complex:
    """log (u;q)_inf for |q| < 1 by direct summation."""
    if not abs(q) < 1:
        raise ConvergenceDomain(f"need |q| < 1, got q={q}")
    total = 0j
    w = complex(u)
    for _ in range(max_terms):
        if abs(w) < tol:
            break
        total += cmath.log(1 - w)
        w *= q
    return total


def exact_pochhammer_log(geom: StripGeometry, z: complex, hbar: float) -> complex:
    """log of the Pochhammer part of psi^vee at q = e^hbar (hbar < 0)."""
    a, b = geom.alpha_c(), geom.beta_c()
    if abs(z) * max([1.0] + [abs(x) for x in a + b]) >= 1:
        raise ConvergenceDomain(f"|z| too large for the expansion: z={z}")
    q = math.exp(hbar)
    t = math.exp(hbar / 2)
    val = -log_poch_numeric(z * t, q)
    val -= sum(log_poch_numeric(bj * z * t, q) for bj in b)
    val += sum(log_poch_numeric(aj * z * t, q) for aj in a)
    return val


def hbar_decay(geom: StripGeometry, z: complex, G: int = 4, hbars=(-0.1, -0.05)) -> tuple[list[float], float]:
    """Errors of the order-G truncation at each hbar and the ratio of the first two."""
    exp = omega_dual_expansion(geom, G)
    errs = [abs(exact_pochhammer_log(geom, z, h) - exp.evaluate(z, h)) for h in hbars]
    return errs, errs[0] / errs[1]
