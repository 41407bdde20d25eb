"""q-Barnes integrands: shift identities and residue-sum reconstruction of the series.

The integrand is L(z) = A(z) * B(1/z) where A collects Pochhammers in z (always
containing 1/(z;q)_inf, the source of the poles at z = q^-n) and B collects
Pochhammers in 1/z.  As a t-adic bi-Laurent series in z its coefficient at z^k
is sum_j A_(k+j) B_j, which converges because every 1/z argument has positive
t-order.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConfigInvalid, ConvergenceBudget, NotInvertible, ResidualNonzero, UnsupportedFraming
from .geometry import StripGeometry
from .quantization import Basepoint
from .series import QLaurent, XSeries, inv_poch_finite, inv_poch_inf, poch_inf, ql_inv

KAPPA = 2j * math.pi  # contour orientation constant, fixed by the n = 0 residue


@dataclass(frozen=True)
class PochFactor:
    """(u w; q)_inf^power with w = z, 1/z or 1 (a constant factor)."""

    u: QLaurent
    kind: str  # "z", "inv_z" or "const"
    power: int  # +1 numerator, -1 denominator
    label: str = ""

    def t_order(self) -> int:
        return int(self.u.valuation())


@dataclass(frozen=True)
class BarnesIntegrand:
    geom: StripGeometry
    bp: Basepoint
    z_factors: tuple[PochFactor, ...]
    prefactor: tuple[PochFactor, ...]
    gauss: Fraction  # coefficient of log(z)^2 / log q
    name: str = ""

    def __post_init__(self):
        if not any(f.kind == "z" and f.power == -1 and f.u == QLaurent.one() for f in self.z_factors):
            raise ConfigInvalid("integrand must contain 1/(z;q)_inf")
        for f in self.z_factors:
            if f.kind == "inv_z" and f.t_order() <= 0:
                raise ConfigInvalid(f"1/z argument {f.u} needs positive t-order")

    def linear_term(self, x: complex) -> complex:
        """Coefficient of -log(z)/log q: x - i pi f."""
        return x - 1j * math.pi * self.geom.f


def _name(geom: StripGeometry, bp: Basepoint) -> str:
    base = {"c3": "F", "conifold": "G"}.get(geom.label(), "L")
    return f"{base}_{'inf' if bp is Basepoint.INF else '1'}"


def build_integrand(geom: StripGeometry, bp=Basepoint.INF) -> BarnesIntegrand:
    bp = Basepoint.parse(bp)
    if bp is Basepoint.ONE and geom.f < -1:
        raise UnsupportedFraming(f"basepoint 1 needs f >= -1, got f={geom.f}")
    t = QLaurent.t()
    q = QLaurent.t(2)
    zf = [PochFactor(QLaurent.one(), "z", -1, "(z;q)")]
    zf.append(PochFactor(t, "inv_z", 1, "(t/z;q)"))
    zf += [PochFactor(b * t, "inv_z", 1, f"(t b{j + 1}/z;q)") for j, b in enumerate(geom.beta_ql())]
    zf.append(PochFactor(q, "inv_z", -1, "(q/z;q)"))
    zf += [PochFactor(a * t, "inv_z", -1, f"(t a{j + 1}/z;q)") for j, a in enumerate(geom.alpha_ql())]
    pre = [PochFactor(q, "const", 2, "(q;q)^2")]
    pre += [PochFactor(a * t, "const", 1, f"(t a{j + 1};q)") for j, a in enumerate(geom.alpha_ql())]
    pre.append(PochFactor(t, "const", -1, "(t;q)"))
    pre += [PochFactor(b * t, "const", -1, f"(t b{j + 1};q)") for j, b in enumerate(geom.beta_ql())]
    if bp is Basepoint.ONE:
        zf.append(PochFactor(QLaurent.t(4), "inv_z", 1, "(q^2/z;q)"))
        zf.append(PochFactor(q, "inv_z", -1, "(q/z;q)"))
        pre.append(PochFactor(q, "const", 1, "(q;q)"))
        pre.append(PochFactor(QLaurent.t(4), "const", -1, "(q^2;q)"))
    return BarnesIntegrand(geom, bp, tuple(zf), tuple(pre), Fraction(geom.f, 2), _name(geom, bp))


def trivial_integrand(geom: StripGeometry | None = None) -> BarnesIntegrand:
    """Only the pole tower 1/(z;q)_inf."""
    geom = geom or StripGeometry.c3(0)
    return BarnesIntegrand(geom, Basepoint.INF, (PochFactor(QLaurent.one(), "z", -1, "(z;q)"),), (), Fraction(0), "trivial")


# ---------------------------------------------------------------------------
# Laurent polynomials in z with QLaurent coefficients
# ---------------------------------------------------------------------------

ZPoly = dict  # z-power -> QLaurent


def _zmul(a: ZPoly, b: ZPoly) -> ZPoly:
    out: ZPoly = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out[i + j] + x * y if i + j in out else x * y
    return out


def _zprod(polys) -> ZPoly:
    out: ZPoly = {0: QLaurent.one()}
    for p in polys:
        out = _zmul(out, p)
    return out


def factor_shift_ratio(ig: BarnesIntegrand) -> tuple[ZPoly, ZPoly]:
    """(num, den) with L(qz) den(z) = L(z) num(z), from each factor's own shift."""
    num, den = [], []
    for f in ig.z_factors:
        if f.kind == "z":
            # (u q z;q)/(u z;q) = 1/(1 - u z)
            lin = {0: QLaurent.one(), 1: -f.u}
            (den if f.power > 0 else num).append(lin)
        elif f.kind == "inv_z":
            # (u/(q z);q)/(u/z;q) = 1 - u q^-1 / z
            lin = {0: QLaurent.one(), -1: -f.u.shift(-2)}
            for _ in range(abs(f.power)):
                (num if f.power > 0 else den).append(lin)
    return _zprod(num), _zprod(den)


def _printed_factors(ig: BarnesIntegrand) -> tuple[list[ZPoly], list[ZPoly]]:
    g = ig.geom
    tinv = QLaurent.t(-1)
    one = QLaurent.one()
    num = [{1: -one, 0: tinv}]
    num += [{1: one, 0: -(b * tinv)} for b in g.beta_ql()]
    den = [{1: one, 0: -(a * tinv)} for a in g.alpha_ql()]
    if g.r >= g.s:
        num.append({g.r - g.s: one})
    else:
        den.append({g.s - g.r: one})
    if ig.bp is Basepoint.ONE:
        num.append({1: one, 0: -QLaurent.t(2)})
        den.append({1: one, 0: -one})
    return num, den


def printed_shift_ratio(ig: BarnesIntegrand) -> tuple[ZPoly, ZPoly]:
    """The closed-form ratio L(qz)/L(z) as (num, den).

    bp=inf: -(z - t^-1) z^(r-s) prod(z - b/t) / prod(z - a/t)
    bp=1:   the same times (z - q)/(z - 1).
    """
    num, den = _printed_factors(ig)
    return _zprod(num), _zprod(den)


# ---------------------------------------------------------------------------
# bi-Laurent expansion
# ---------------------------------------------------------------------------


def _poch_series(u: QLaurent, power: int, N: int, trunc: int) -> list[QLaurent]:
    """(u w;q)_inf^power as a w-series to w^N, power = +-1."""
    out = []
    un = QLaurent.one()
    for n in range(N + 1):
        inv_qq = inv_poch_finite(QLaurent.t(2), n, trunc)
        c = un * inv_qq
        if power > 0:
            c = c.shift(n * (n - 1)) * (-1 if n % 2 else 1)
        out.append(c.truncate(trunc))
        un = un * u
    return out


def _series_product(factors: list[PochFactor], N: int, trunc: int) -> list[QLaurent]:
    out = [QLaurent.one().truncate(trunc)] + [QLaurent.zero(trunc)] * N
    for f in factors:
        for _ in range(abs(f.power)):
            s = _poch_series(f.u, 1 if f.power > 0 else -1, N, trunc)
            out = [sum((out[i] * s[n - i] for i in range(n + 1)), QLaurent.zero(trunc)).truncate(trunc)
                   for n in range(N + 1)]
    return out


@dataclass
class BiLaurent:
    coeffs: dict[int, QLaurent]
    trunc: int


def _expand(ig: BarnesIntegrand, kmin: int, kmax: int, trunc_at) -> dict[int, QLaurent]:
    """L_k = sum_j A_(k+j) B_j below t^trunc_at(k) for kmin <= k <= kmax."""
    zf = [f for f in ig.z_factors if f.kind == "z"]
    wf = [f for f in ig.z_factors if f.kind == "inv_z"]
    pA = min(max(f.t_order(), 0) for f in zf)
    pB = min(f.t_order() for f in wf) if wf else None
    if wf and pA + pB <= 0:
        raise ConvergenceBudget("bi-Laurent coefficients do not converge t-adically")
    ks = range(kmin, kmax + 1)

    def jmax_for(k):
        if not wf:
            return 0
        j = max(0, -k)
        while (k + j) * pA + j * pB < trunc_at(k):
            j += 1
        return j

    J = max(jmax_for(k) for k in ks)
    M = max(kmax + J, 0)
    # pA >= 0, so every A_m B_j is needed only below the largest target
    work = max(trunc_at(k) for k in ks)
    A = _series_product(zf, M, work)
    B = _series_product(wf, J, work) if wf else [QLaurent.one()]
    out = {}
    for k in ks:
        T = trunc_at(k)
        acc = QLaurent.zero(T)
        for j in range(max(0, -k), min(jmax_for(k), len(B) - 1) + 1):
            m = k + j
            if m > M:
                break
            acc = acc + A[m] * B[j]
        out[k] = acc.truncate(T)
    return out


def expand_integrand(ig: BarnesIntegrand, kmin: int, kmax: int, t_trunc: int, sigma: int = 0) -> BiLaurent:
    """Coefficients of L(q^sigma z) at z^k, kmin <= k <= kmax, below t^t_trunc.

    Under z -> q^sigma z the coefficient at z^k is q^(sigma k) L_k, so L_k is
    computed to t^(t_trunc - 2 sigma k) first.
    """
    raw = _expand(ig, kmin, kmax, lambda k: t_trunc + max(0, -2 * sigma * k))
    return BiLaurent({k: c.shift(2 * sigma * k).truncate(t_trunc) for k, c in raw.items()}, t_trunc)


@dataclass
class ShiftCheck:
    residual: dict[int, QLaurent]
    z_range: int
    t_trunc: int

    @property
    def ok(self) -> bool:
        return all(c.is_zero() for c in self.residual.values())

    def first_failure(self):
        for k in sorted(self.residual):
            if not self.residual[k].is_zero():
                return k, self.residual[k].valuation()
        return None

    def kernel_order(self, max_order: int = 4) -> int | None:
        """Smallest m with (z - 1)^m * residual = 0 on the checked window."""
        seq = dict(self.residual)
        for m in range(max_order + 1):
            if all(c.is_zero() for c in seq.values()):
                return m
            # (z - 1) R has coefficient R_(k-1) - R_k at z^k
            seq = {k: seq[k - 1] - seq[k] for k in seq if k - 1 in seq}
        return None

    def constant_value(self) -> QLaurent | None:
        """The common coefficient when the residual is c * sum_k z^k, else None."""
        vals = list(self.residual.values())
        if all(v == vals[0] for v in vals):
            return vals[0]
        return None


def integrand_shift_check(ig: BarnesIntegrand, t_trunc: int = 16, z_range: int = 8,
                          ratio: str = "printed", raise_on_failure: bool = False) -> ShiftCheck:
    """Residual den(z) L(qz) - num(z) L(z) at z^k, |k| <= z_range, below t^t_trunc."""
    num, den = printed_shift_ratio(ig) if ratio == "printed" else factor_shift_ratio(ig)
    degs = list(num) + list(den)
    lo, hi = min(degs), max(degs)
    margin = -min(int(c.valuation()) for c in list(num.values()) + list(den.values()))
    margin = max(margin, 0)
    T = t_trunc + margin
    kmin, kmax = -z_range - hi, z_range - lo
    raw = _expand(ig, kmin, kmax, lambda k: T + max(0, -2 * k))
    L0 = BiLaurent({k: c.truncate(T) for k, c in raw.items()}, T)
    Lq = BiLaurent({k: c.shift(2 * k).truncate(T) for k, c in raw.items()}, T)
    residual = {}
    for k in range(-z_range, z_range + 1):
        acc = QLaurent.zero(t_trunc)
        for i, c in den.items():
            acc = acc + c * Lq.coeffs[k - i]
        for i, c in num.items():
            acc = acc - c * L0.coeffs[k - i]
        residual[k] = acc.truncate(t_trunc)
    check = ShiftCheck(residual, z_range, t_trunc)
    if raise_on_failure and not check.ok:
        raise ResidualNonzero(check.first_failure())
    return check


def _poch_value(u: QLaurent, power: int, trunc: int, pending: list) -> QLaurent:
    """(u;q)_inf^power, also when the first few factors have t-order <= 0.

    Non-invertible leading factors of a denominator are left out and appended
    to ``pending`` so the caller can cancel them.
    """
    fin = QLaurent.one()
    k = 0
    while u.shift(2 * k).valuation() <= 0:
        fin = fin * (1 - u.shift(2 * k))
        k += 1
    rest = u.shift(2 * k)
    if power > 0:
        return (fin * poch_inf(rest, trunc + 2 * k)).truncate(trunc)
    try:
        inv = ql_inv(fin, trunc + 2 * k)
    except NotInvertible:
        pending.append(fin)
        inv = QLaurent.one()
    return (inv * inv_poch_inf(rest, trunc + 2 * k)).truncate(trunc)


def pole_delta_coefficient(ig: BarnesIntegrand, t_trunc: int = 16) -> QLaurent:
    """Predicted constant value of the closed-form shift residual.

    The z-expansions of L(qz) and L(z) live on the two sides of the pole of
    L(qz) at z = 1.  With a pole of order m and den = (z - 1)^(m-1) d(z), the
    residual den L(qz) - num L(z) equals d(1) rho_m at every z^k,
    rho_m = lim (z - 1)^m L(qz).
    """
    q = QLaurent.t(2)
    poles = [f for f in ig.z_factors if f.kind == "inv_z" and f.power < 0 and f.u == q]
    m = len(poles)
    if m == 0:
        raise ConfigInvalid("L(qz) has no pole at z = 1")
    work = t_trunc + 2 * (m + ig.geom.r + ig.geom.s)
    pending: list[QLaurent] = []
    val = QLaurent.one().truncate(work)
    for f in ig.z_factors:
        if any(f is p for p in poles):
            # 1/(1/z;q)_inf = z/(z - 1) / (q/z;q)_inf
            val = val * inv_poch_inf(q, work)
            continue
        arg = f.u.shift(2) if f.kind == "z" else f.u.shift(-2)
        val = val * _poch_value(arg, f.power, work, pending)
    _, den = _printed_factors(ig)
    unit = {1: QLaurent.one(), 0: -QLaurent.one()}
    ones = [d for d in den if d == unit]
    if len(ones) != m - 1:
        raise ConfigInvalid("closed-form denominator does not carry (z - 1)^(m - 1)")
    d1 = QLaurent.one()
    for d in den:
        if d == unit:
            continue
        v = sum(d.values(), QLaurent.zero())
        hit = next((i for i, p in enumerate(pending) if p == v), None)
        if hit is None:
            d1 = d1 * v
        else:
            pending.pop(hit)
    if pending:
        raise NotInvertible(f"uncancelled factor {pending[0]}")
    return (d1 * val).truncate(t_trunc)


# ---------------------------------------------------------------------------
# numerics
# ---------------------------------------------------------------------------


def poch_inf_numeric(u: complex, q: float, tol: float = 1e-18, max_terms: int = 100000) -> complex:
    out = 1 + 0j
    w = complex(u)
    for _ in range(max_terms):
        if abs(w) < tol:
            return out
        out *= 1 - w
        w *= q
    raise ConvergenceBudget(f"(u;q)_inf did not converge for u={u}, q={q}")


def poch_numeric(u: complex, q: float, n: int) -> complex:
    out = 1 + 0j
    for k in range(n):
        out *= 1 - u * q ** k
    return out


def _check_numeric(geom: StripGeometry, q: float):
    if geom.symbolic:
        raise ConfigInvalid("numeric evaluation needs numeric parameters")
    if not 0 < q < 1:
        raise ConfigInvalid(f"need 0 < q < 1, got {q}")


def series_coefficient(geom: StripGeometry, bp: Basepoint, q: float, n: int) -> complex:
    f = geom.f
    t = math.sqrt(q)
    c = (-1) ** (n * (f + 1)) * q ** (n * n * (1 + f) / 2 + n / 2)
    for a in geom.alpha_c():
        c *= poch_numeric(t * a, q, n)
    c /= poch_numeric(t, q, n)
    for b in geom.beta_c():
        c /= poch_numeric(t * b, q, n)
    if bp is Basepoint.ONE:
        c *= (1 - q) / (1 - q ** (n + 1))
    return c


def numeric_psi(geom: StripGeometry, bp, x: complex, q: float, N: int = 25, tol: float = 1e-12) -> complex:
    """Direct partial sum of the series to X^N."""
    bp = Basepoint.parse(bp)
    _check_numeric(geom, q)
    if bp is Basepoint.ONE and geom.f < -1:
        raise UnsupportedFraming(f"basepoint 1 needs f >= -1, got f={geom.f}")
    X = cmath.exp(x)
    terms = [series_coefficient(geom, bp, q, n) * X ** n for n in range(N + 1)]
    total = sum(terms)
    tail = abs(terms[-1]) + (abs(terms[-2]) if N >= 1 else 0)
    if tail > tol * max(1.0, abs(total)):
        raise ConvergenceBudget(f"series tail {tail:.3e} above tolerance at N={N}")
    return total


def gaussian_at_pole(ig: BarnesIntegrand, n: int) -> tuple[Fraction, int, int]:
    """Exact data of the gaussian at z = q^-n: (q-exponent, power of e^x, sign)."""
    # log z = -n log q: (f/2) n^2 log q + n x - i pi f n
    qexp = ig.gauss * n * n
    sign = -1 if (ig.geom.f * n) % 2 else 1
    return Fraction(qexp), n, sign


def _factor_value(f: PochFactor, z: complex, q: float, values: dict) -> complex:
    u = f.u.evaluate(math.sqrt(q), values)
    if f.kind == "z":
        arg = u * z
    elif f.kind == "inv_z":
        arg = u / z
    else:
        arg = u
    return poch_inf_numeric(arg, q) ** f.power


def numeric_values(geom: StripGeometry) -> dict[str, complex]:
    """Values of the symbols a1.., b1.. of the generic integrand."""
    values = {f"a{j + 1}": complex(a) for j, a in enumerate(geom.alpha_c())}
    values.update({f"b{j + 1}": complex(b) for j, b in enumerate(geom.beta_c())})
    return values


def symbolic_integrand(geom: StripGeometry, bp=Basepoint.INF) -> BarnesIntegrand:
    """Integrand of the same shape with symbolic parameters (floats are not exact)."""
    return build_integrand(StripGeometry.generic(geom.r, geom.s, geom.f), bp)


def residue_terms(ig: BarnesIntegrand, x: complex, q: float, Nres: int,
                  values: dict[str, complex] | None = None) -> list[complex]:
    """kappa * prefactor * Res_{z=q^-n} [L(z) gaussian(z) / z] for n = 0..Nres.

    Symbolic parameters of ``ig`` are evaluated from ``values``.
    """
    if not 0 < q < 1:
        raise ConfigInvalid(f"need 0 < q < 1, got {q}")
    values = values or {}
    pref = 1 + 0j
    for f in ig.prefactor:
        pref *= _factor_value(f, 1.0, q, values)
    pref *= 1j / (2 * math.pi)
    qq_inf = poch_inf_numeric(q, q)
    out = []
    for n in range(Nres + 1):
        z = q ** (-n)
        # residue of 1/(z;q)_inf at z = q^-n
        res = -q ** (-n) / (poch_numeric(1 / q, 1 / q, n) * qq_inf)
        reg = 1 + 0j
        for f in ig.z_factors:
            if f.kind == "z" and f.power == -1 and f.u == QLaurent.one():
                continue
            reg *= _factor_value(f, z, q, values)
        qexp, xpow, sign = gaussian_at_pole(ig, n)
        gauss = q ** float(qexp) * cmath.exp(x) ** xpow * sign
        out.append(KAPPA * pref * res * reg * gauss / z)
    return out


def residue_sum(geom: StripGeometry, bp, x: complex, q: float, Nres: int = 25, tol: float = 1e-12) -> complex:
    _check_numeric(geom, q)
    ig = symbolic_integrand(geom, bp)
    terms = residue_terms(ig, x, q, Nres, numeric_values(geom))
    total = sum(terms)
    tail = abs(terms[-1]) + (abs(terms[-2]) if Nres >= 1 else 0)
    if tail > tol * max(1.0, abs(total)):
        raise ConvergenceBudget(f"residue tail {tail:.3e} above tolerance at Nres={Nres}")
    return total


def gaussian_numeric(ig: BarnesIntegrand, z: complex, x: complex, q: float) -> complex:
    """exp(gauss log^2 z / log q - (x - i pi f) log z / log q), principal log z."""
    lz = cmath.log(z)
    lq = math.log(q)
    return cmath.exp(float(ig.gauss) * lz * lz / lq - ig.linear_term(x) * lz / lq)


@dataclass
class NumericReport:
    geometry: str
    f: int
    bp: str
    x: complex
    q: float
    N: int
    Nres: int
    series: complex
    residues: complex

    @property
    def delta(self) -> float:
        return abs(self.series - self.residues)

    def as_record(self) -> dict:
        return {
            "geometry": self.geometry,
            "f": self.f,
            "bp": self.bp,
            "x": [self.x.real, self.x.imag],
            "q": self.q,
            "N": self.N,
            "Nres": self.Nres,
            "series": [self.series.real, self.series.imag],
            "residue_sum": [self.residues.real, self.residues.imag],
            "abs_delta": self.delta,
        }


def numeric_report(geom: StripGeometry, bp, x: complex, q: float, N: int = 25, Nres: int = 25) -> NumericReport:
    bp = Basepoint.parse(bp)
    s = numeric_psi(geom, bp, x, q, N)
    r = residue_sum(geom, bp, x, q, Nres)
    return NumericReport(geom.label(), geom.f, bp.value, complex(x), q, N, Nres, s, r)
