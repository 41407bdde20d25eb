"""Invariant suite run by ``qstrip verify``."""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, field
from typing import Callable

from .barnes import build_integrand, integrand_shift_check, numeric_psi, pole_delta_coefficient, residue_sum
from .config import JobConfig
from .dt import product_decompose, roundtrip_ok
from .dual import dual_wave, verify_dual_difference
from .errors import QStripError
from .geometry import curve_eval, parametrize, saddle_potential
from .quantization import (
    apply_operator,
    build_quantum_curve,
    classical_factorization,
    closed_form_psi,
    frobenius_solve,
)
from .quiver import quiver_eval, to_quiver
from .series import Direction, XSeries

PASS, FAIL, SKIP = "pass", "fail", "skip"


@dataclass
class PropertyResult:
    name: str
    status: str
    detail: str = ""

    def as_record(self) -> dict:
        return {"property": self.name, "status": self.status, "detail": self.detail}


@dataclass
class VerifyReport:
    results: list[PropertyResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.status != FAIL for r in self.results)

    def as_record(self) -> dict:
        return {"ok": self.ok, "properties": [r.as_record() for r in self.results]}


class _Context:
    """Lazily computed shared objects for one config."""

    def __init__(self, cfg: JobConfig):
        self.cfg = cfg
        self.geom = cfg.geom
        self.ngeom = cfg.numeric_geom()
        self.bp = cfg.basepoint
        self._cache: dict[str, object] = {}

    def get(self, key: str, make: Callable[[], object]):
        if key not in self._cache:
            self._cache[key] = make()
        return self._cache[key]

    @property
    def op(self):
        return self.get("op", lambda: build_quantum_curve(self.geom, self.bp))

    @property
    def psi(self) -> XSeries:
        c = self.cfg
        return self.get("psi", lambda: closed_form_psi(self.geom, self.bp, c.x_order, c.t_order))


def _first_nonzero(res: XSeries, start: int = 0):
    for n in res.degrees():
        if n >= start and not res[n].is_zero():
            return n
    return None


def _annihilation_exact(ctx: _Context) -> PropertyResult:
    res = apply_operator(ctx.op, ctx.psi)
    n = _first_nonzero(res)
    if n is None:
        return PropertyResult("annihilation_exact", PASS)
    return PropertyResult("annihilation_exact", FAIL, f"X^{n} coefficient {res[n].poly_str()}")


def _annihilation_above_0(ctx: _Context) -> PropertyResult:
    res = apply_operator(ctx.op, ctx.psi)
    n = _first_nonzero(res, 1)
    if n is None:
        return PropertyResult("annihilation_above_degree0", PASS)
    return PropertyResult("annihilation_above_degree0", FAIL, f"X^{n} coefficient nonzero")


def _frobenius(ctx: _Context) -> PropertyResult:
    c = ctx.cfg
    fr = frobenius_solve(ctx.op, Direction.ASCENDING_X, c.x_order, c.t_order)
    bad = fr.first_disagreement(ctx.psi)
    if bad is None:
        return PropertyResult("frobenius_matches_closed_form", PASS)
    return PropertyResult("frobenius_matches_closed_form", FAIL, f"first disagreement {bad}")


def _classical(ctx: _Context) -> PropertyResult:
    rep = classical_factorization(ctx.op, ctx.geom)
    detail = f"(Y-1)^{rep.y_minus_1_factors} unit {rep.unit}"
    return PropertyResult("classical_limit", PASS if rep.matches else FAIL, detail)


def _quiver(ctx: _Context) -> PropertyResult:
    c = ctx.cfg
    model = to_quiver(ctx.geom, ctx.bp)
    qs = quiver_eval(model, c.x_order, c.t_order)
    bad = qs.first_disagreement(ctx.psi)
    detail = f"{len(model.nodes)} nodes"
    if bad is None:
        return PropertyResult("quiver_matches_series", PASS, detail)
    return PropertyResult("quiver_matches_series", FAIL, f"{detail}, first disagreement {bad}")


def _dt_roundtrip(ctx: _Context) -> PropertyResult:
    ok = roundtrip_ok(ctx.psi, ctx.cfg.x_order)
    return PropertyResult("dt_roundtrip", PASS if ok else FAIL)


def _dt_integral(ctx: _Context) -> PropertyResult:
    if ctx.geom.r + ctx.geom.s and not ctx.geom.symbolic:
        # numeric parameters fold their powers into the exponents
        return PropertyResult("dt_integrality", SKIP, "needs symbolic parameters")
    fac = product_decompose(ctx.psi, ctx.cfg.x_order)
    bad = [f for f in fac.factors if not f.integral]
    if not bad:
        return PropertyResult("dt_integrality", PASS, f"{len(fac.factors)} factors")
    f = bad[0]
    return PropertyResult("dt_integrality", FAIL, f"non-integral exponent at d={f.d}, s={f.s}")


def _dual(ctx: _Context) -> PropertyResult:
    chk = verify_dual_difference(dual_wave(ctx.geom, 10), t_trunc=ctx.cfg.t_order)
    if chk.ok:
        return PropertyResult("dual_difference", PASS)
    what = "prefactor" if not chk.prefactor_ok else f"z^{_first_nonzero(chk.residual)}"
    return PropertyResult("dual_difference", FAIL, f"residual at {what}")


def _shift_sizes(ctx: _Context) -> tuple[int, int]:
    # keep the symbolic bi-Laurent work bounded for wide strips
    width = ctx.geom.r + ctx.geom.s
    return (12, 6) if width <= 2 else (8, 3)


def _barnes_factor(ctx: _Context) -> PropertyResult:
    T, Z = _shift_sizes(ctx)
    chk = integrand_shift_check(build_integrand(ctx.geom, ctx.bp), T, Z, ratio="factor")
    return PropertyResult("barnes_shift_factorwise", PASS if chk.ok else FAIL,
                          "" if chk.ok else f"first failure {chk.first_failure()}")


def _barnes_printed(ctx: _Context) -> PropertyResult:
    T, Z = _shift_sizes(ctx)
    chk = integrand_shift_check(build_integrand(ctx.geom, ctx.bp), T, Z, ratio="printed")
    if chk.ok:
        return PropertyResult("barnes_shift_closed_form", PASS)
    return PropertyResult("barnes_shift_closed_form", FAIL, f"first failure {chk.first_failure()}")


def _barnes_pole(ctx: _Context) -> PropertyResult:
    T, Z = _shift_sizes(ctx)
    ig = build_integrand(ctx.geom, ctx.bp)
    chk = integrand_shift_check(ig, T, Z, ratio="printed")
    const = chk.constant_value()
    if const is None:
        return PropertyResult("barnes_shift_pole_term", FAIL, "residual is not constant in z")
    pred = pole_delta_coefficient(ig, T)
    ok = pred.agrees(const)
    return PropertyResult("barnes_shift_pole_term", PASS if ok else FAIL, f"constant {const.poly_str()}")


def _residues(ctx: _Context) -> PropertyResult:
    nb = ctx.cfg.numeric
    s = numeric_psi(ctx.ngeom, ctx.bp, nb.x, nb.q, nb.terms)
    r = residue_sum(ctx.ngeom, ctx.bp, nb.x, nb.q, nb.residues)
    d = abs(s - r)
    return PropertyResult("residue_reconstruction", PASS if d < 1e-8 else FAIL, f"|delta| = {d:.3e}")


def _saddle(ctx: _Context) -> PropertyResult:
    rng = random.Random(0)
    worst = 0.0
    for _ in range(10):
        x = complex(rng.uniform(-3, 1), rng.uniform(-math.pi, math.pi))
        sr = saddle_potential(ctx.ngeom, x)
        worst = max([worst] + sr.curve_residuals(ctx.ngeom))
    return PropertyResult("saddle_on_curve", PASS if worst < 1e-10 else FAIL, f"max residual {worst:.3e}")


def _param(ctx: _Context) -> PropertyResult:
    worst = 0.0
    for k in range(1, 9):
        z = 0.35 * cmath.exp(0.7j * k)
        x, y = parametrize(ctx.ngeom, z)
        worst = max(worst, abs(curve_eval(ctx.ngeom, cmath.exp(x), cmath.exp(y))))
    return PropertyResult("parametrization_on_curve", PASS if worst < 1e-10 else FAIL, f"max residual {worst:.3e}")


EXACT = [
    ("annihilation_exact", _annihilation_exact),
    ("annihilation_above_degree0", _annihilation_above_0),
    ("frobenius_matches_closed_form", _frobenius),
    ("classical_limit", _classical),
    ("quiver_matches_series", _quiver),
    ("dt_roundtrip", _dt_roundtrip),
    ("dt_integrality", _dt_integral),
    ("dual_difference", _dual),
    ("barnes_shift_factorwise", _barnes_factor),
    ("barnes_shift_closed_form", _barnes_printed),
    ("barnes_shift_pole_term", _barnes_pole),
]
NUMERIC = [("saddle_on_curve", _saddle), ("parametrization_on_curve", _param)]


def run_verify(cfg: JobConfig) -> VerifyReport:
    ctx = _Context(cfg)
    report = VerifyReport()
    geom = ctx.geom
    for name, check in EXACT:
        if not geom.exact:
            report.results.append(PropertyResult(name, SKIP, "inexact parameters"))
            continue
        try:
            report.results.append(check(ctx))
        except QStripError as exc:
            report.results.append(PropertyResult(name, FAIL, f"{type(exc).__name__}: {exc}"))
    for name, check in NUMERIC:
        if ctx.ngeom is None:
            report.results.append(PropertyResult(name, SKIP, "symbolic parameters without numeric values"))
            continue
        report.results.append(check(ctx))
    if cfg.numeric is None or ctx.ngeom is None:
        report.results.append(PropertyResult("residue_reconstruction", SKIP, "no numeric block"))
    elif geom.f < -1:
        report.results.append(PropertyResult("residue_reconstruction", SKIP, "series diverges for f <= -2"))
    else:
        try:
            report.results.append(_residues(ctx))
        except QStripError as exc:
            report.results.append(PropertyResult("residue_reconstruction", FAIL, f"{type(exc).__name__}: {exc}"))
    return report
