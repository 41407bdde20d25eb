"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` or ``python3 tests/test_acceptance.py``.
Each line is also repeated in the pytest terminal summary.
"""

import cmath
import math
import random
import sys
import time
from functools import lru_cache
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from conftest import geometry_matrix  # noqa: E402

from qstrip.barnes import (  # noqa: E402
    build_integrand,
    integrand_shift_check,
    numeric_psi,
    residue_sum,
)
from qstrip.dt import product_decompose, refactor_check  # noqa: E402
from qstrip.dual import dual_wave, hbar_decay, verify_dual_difference  # noqa: E402
from qstrip.geometry import StripGeometry, classical_curve, saddle_potential  # noqa: E402
from qstrip.quantization import (  # noqa: E402
    Basepoint,
    apply_operator,
    build_quantum_curve,
    classical_factorization,
    classical_limit,
    closed_form_psi,
    frobenius_solve,
)
from qstrip.quiver import quiver_eval, to_quiver  # noqa: E402
from qstrip.series import Direction  # noqa: E402

RESULTS: list[str] = []

MATRIX = list(geometry_matrix())


@lru_cache(maxsize=None)
def _psi(geom, bp, N, T):
    return closed_form_psi(geom, bp, N, T)


def report(num: int, ok: bool, detail: str, seconds: float) -> None:
    line = f"criterion {num:2d} {'PASS' if ok else 'FAIL'} ({seconds:.1f} s) {detail}"
    RESULTS.append(line)
    print(line)


def criterion_1():
    bad = []
    for geom, bp in MATRIX:
        res = apply_operator(build_quantum_curve(geom, bp), _psi(geom, bp, 10, 24))
        nz = [n for n in res.degrees() if not res[n].is_zero()]
        if nz:
            bad.append((geom.label(), geom.r, geom.s, geom.f, bp.value, nz))
    degrees = sorted({n for *_, nz in bad for n in nz})
    return not bad, f"{len(MATRIX) - len(bad)}/{len(MATRIX)} annihilated; nonzero X-degrees {degrees}"


def criterion_2():
    bad = 0
    for geom, bp in MATRIX:
        fr = frobenius_solve(build_quantum_curve(geom, bp), Direction.ASCENDING_X, 10, 24)
        if fr.first_disagreement(_psi(geom, bp, 10, 24)) is not None:
            bad += 1
    return bad == 0, f"{len(MATRIX) - bad}/{len(MATRIX)} match"


def criterion_3():
    bad = []
    for geom, bp in MATRIX:
        op = build_quantum_curve(geom, bp)
        if bp is Basepoint.INF:
            ok = (classical_limit(op) + classical_curve(geom)).is_zero()
        else:
            rep = classical_factorization(op, geom)
            ok = rep.matches and rep.y_minus_1_factors == 1 and rep.unit in (1, -1)
        if not ok:
            bad.append((geom.r, geom.s, geom.f, bp.value))
    c3 = str(classical_limit(build_quantum_curve(StripGeometry.c3(1))))
    ok = not bad and c3 == "-1 + Y + X*Y^2"
    return ok, f"{len(MATRIX) - len(bad)}/{len(MATRIX)} limits; C^3 f=1 limit {c3}"


def criterion_4():
    cases = [StripGeometry.c3(1), StripGeometry.conifold(-1), StripGeometry.conifold(0)]
    bad, counts = [], {}
    for geom in cases:
        for bp in (Basepoint.INF, Basepoint.ONE):
            model = to_quiver(geom, bp)
            qs = quiver_eval(model, 6, 20)
            if qs.first_disagreement(_psi(geom, bp, 6, 20)) is not None:
                bad.append((geom.label(), geom.f, bp.value))
            if model.C[model.principal][model.principal] != geom.f + 1:
                bad.append(("diagonal", geom.label(), geom.f, bp.value))
            counts[(geom.label(), bp.value)] = len(model.nodes)
    nodes_ok = counts[("c3", "inf")] == 5 and counts[("conifold", "inf")] == 7
    return not bad and nodes_ok, f"{len(bad)} mismatches; node counts c3 {counts[('c3', 'inf')]}, conifold {counts[('conifold', 'inf')]}"


NAMED = [StripGeometry.c3(1), StripGeometry.c3(-2), StripGeometry.conifold(-1), StripGeometry.conifold(0)]


def criterion_5():
    problems = []
    for geom in NAMED:
        rows = {}
        for bp in (Basepoint.INF, Basepoint.ONE):
            if bp is Basepoint.ONE and geom.f < -1:
                continue
            psi = _psi(geom, bp, 5, 12)
            fac = product_decompose(psi, 5)
            if not fac.all_integral(5):
                problems.append(f"non-integral {geom.label()} f={geom.f} bp={bp.value}")
            back = refactor_check(fac)
            for n in range(1, 6):
                if not back[n].truncate(fac.truncs[n]).agrees(psi[n].truncate(fac.truncs[n])):
                    problems.append(f"refactor {geom.label()} f={geom.f} bp={bp.value} X^{n}")
                    break
            rows[bp] = fac.rows()
        if len(rows) == 2 and rows[Basepoint.INF] == rows[Basepoint.ONE]:
            problems.append(f"basepoints agree for {geom.label()} f={geom.f}")
    return not problems, "; ".join(problems) or "integral, round trip exact, basepoints differ"


SHIFT = [
    (StripGeometry.generic(1, 1, 0), Basepoint.INF),
    (StripGeometry.generic(1, 1, 0), Basepoint.ONE),
    (StripGeometry.c3(1), Basepoint.INF),
    (StripGeometry.c3(1), Basepoint.ONE),
    (StripGeometry.conifold(0), Basepoint.INF),
    (StripGeometry.conifold(0), Basepoint.ONE),
]


def criterion_6():
    failed = []
    for geom, bp in SHIFT:
        ig = build_integrand(geom, bp)
        chk = integrand_shift_check(ig, 16, 8, ratio="printed")
        if not chk.ok:
            failed.append(f"{ig.name}@z^{chk.first_failure()[0]}")
    return not failed, f"nonzero residual for {', '.join(failed)}" if failed else "all residuals vanish"


def criterion_7():
    worst = 0.0
    cases = 0
    for geom in (StripGeometry.c3(1), StripGeometry.conifold(-1, 0.1)):
        for bp in (Basepoint.INF, Basepoint.ONE):
            for q in (0.25, 0.3):
                for x in (-2.0, -3.0):
                    d = abs(numeric_psi(geom, bp, x, q, 25) - residue_sum(geom, bp, x, q, 25))
                    worst = max(worst, d)
                    cases += 1
    return worst < 1e-8, f"{cases} cases, max |delta| {worst:.2e}"


def criterion_8():
    ratios = []
    for geom in (StripGeometry.c3(1), StripGeometry.conifold(0, 0.1)):
        _, ratio = hbar_decay(geom, 0.2, G=4, hbars=(-0.1, -0.05))
        ratios.append(ratio)
    ok = all(abs(r / 32 - 1) < 0.2 for r in ratios)
    return ok, "ratios " + ", ".join(f"{r:.2f}" for r in ratios) + " (target 32)"


SADDLE = [
    StripGeometry.c3(1),
    StripGeometry.conifold(0, 0.1),
    StripGeometry((0.1,), (0.2,), 0),
    StripGeometry((0.1, 0.3), (0.2, 0.4), 0),
]


def criterion_9():
    rng = random.Random(2024)
    worst, samples = 0.0, 0
    for base in SADDLE:
        for f in range(-2, 3):
            geom = base.with_framing(f)
            for _ in range(50):
                x = complex(rng.uniform(-3, 1), rng.uniform(-math.pi, math.pi))
                sr = saddle_potential(geom, x)
                worst = max([worst] + sr.curve_residuals(geom))
                samples += 1
    return worst < 1e-10, f"{samples} samples, max residual {worst:.2e}"


def criterion_10():
    geoms = {(g.r, g.s, g.f): g for g, _ in MATRIX}
    bad = [k for k, g in geoms.items() if not verify_dual_difference(dual_wave(g, 10), t_trunc=24).ok]
    return not bad, f"{len(geoms) - len(bad)}/{len(geoms)} geometries"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def _run(num: int) -> tuple[bool, str]:
    start = time.perf_counter()
    ok, detail = CRITERIA[num - 1]()
    report(num, ok, detail, time.perf_counter() - start)
    return ok, detail


@pytest.mark.parametrize("num", range(1, 11))
def test_acceptance(num):
    ok, detail = _run(num)
    assert ok, detail


if __name__ == "__main__":
    results = [_run(n)[0] for n in range(1, 11)]
    sys.exit(0 if all(results) else 1)
