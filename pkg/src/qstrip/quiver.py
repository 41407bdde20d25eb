"""Symmetric-quiver (Nahm sum) forms of the wave-function series.

Every finite Pochhammer in a series coefficient is expanded into a double sum,

    (u;q)_n   = sum_{i,j} (-u/t)^i u^j t^(i^2 + 2nj) / ((q;q)_i (q;q)_j)
    1/(u;q)_n = sum_{i,j} (-u/t)^i u^j t^(i^2 + 2ni) / ((q;q)_i (q;q)_j)

so each factor contributes two nodes.  A lattice term is

    prod_k (eps_k t^(p_k) m_k X^(deg_k))^(d_k) * t^(d^T C d) / prod_k (q;q)_(d_k)

so t^(d^T C d) = q^(d^T C d / 2) and C is an integer matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from .errors import NonTerminating, UnsupportedFraming
from .geometry import StripGeometry
from .quantization import Basepoint
from .series import Direction, QLaurent, XSeries, inv_poch_finite, mono


@dataclass(frozen=True)
class QuiverNode:
    label: str
    sign: int
    t_power: int
    param: object = None  # parameter symbol or number multiplying the variable
    x_degree: int = 0
    source: str = ""

    def variable(self) -> QLaurent:
        if self.param is None:
            base = QLaurent.one()
        elif isinstance(self.param, str):
            base = QLaurent.param(self.param)
        else:
            base = QLaurent.one() * self.param
        return base.shift(self.t_power) * self.sign

    def as_record(self) -> dict:
        return {
            "label": self.label,
            "sign": self.sign,
            "t_power": self.t_power,
            "param": None if self.param is None else str(self.param),
            "x_degree": self.x_degree,
            "source": self.source,
        }


@dataclass(frozen=True)
class QuiverModel:
    nodes: tuple[QuiverNode, ...]
    C: tuple[tuple[int, ...], ...]
    framing: int = 0
    basepoint: Basepoint = Basepoint.INF

    def __post_init__(self):
        n = len(self.nodes)
        if len(self.C) != n or any(len(row) != n for row in self.C):
            raise ValueError("C must be square with one row per node")
        for i in range(n):
            for j in range(n):
                if self.C[i][j] != self.C[j][i]:
                    raise ValueError("C must be symmetric")
        if sum(1 for nd in self.nodes if nd.x_degree == 1) != 1:
            raise ValueError("exactly one node must carry X")

    @property
    def principal(self) -> int:
        return next(i for i, nd in enumerate(self.nodes) if nd.x_degree == 1)

    def labels(self) -> list[str]:
        return [nd.label for nd in self.nodes]


def _factor_nodes(tag: str, u_power: int, param, numerator: bool, source: str):
    """Two nodes from (u;q)_n (numerator) or 1/(u;q)_n, u = t^u_power * param."""
    i_node = QuiverNode(f"{tag}.i", -1, u_power - 1, param, 0, source)
    j_node = QuiverNode(f"{tag}.j", 1, u_power, param, 0, source)
    # (diag_i, diag_j, coupling_i, coupling_j) to the principal node
    couple = (0, 1) if numerator else (1, 0)
    return (i_node, j_node), couple


def to_quiver(geom: StripGeometry, bp=Basepoint.INF) -> QuiverModel:
    """Quiver whose Nahm sum equals the closed-form series at the given basepoint."""
    bp = Basepoint.parse(bp)
    if bp is Basepoint.ONE and geom.f < -1:
        raise UnsupportedFraming(f"basepoint 1 needs f >= -1, got f={geom.f}")
    f = geom.f
    principal = QuiverNode("n", -1 if (f + 1) % 2 else 1, 1, None, 1, "principal (q;q)_n normalization")
    factors = [("qq", 2, None, True, "(q;q)_n inserted for the normalization")]
    for j, a in enumerate(geom.alphas):
        factors.append((f"a{j + 1}", 1, a, True, f"(t alpha_{j + 1};q)_n"))
    factors.append(("t", 1, None, False, "1/(t;q)_n"))
    for j, b in enumerate(geom.betas):
        factors.append((f"b{j + 1}", 1, b, False, f"1/(t beta_{j + 1};q)_n"))
    if bp is Basepoint.ONE:
        factors.append(("q1", 2, None, True, "(q;q)_n of the basepoint ratio"))
        factors.append(("q2", 4, None, False, "1/(q^2;q)_n of the basepoint ratio"))
    nodes = [principal]
    diag = [f + 1]
    couple = [0]
    for tag, up, param, numer, src in factors:
        pair, (ci, cj) = _factor_nodes(tag, up, param, numer, src)
        nodes.extend(pair)
        diag.extend([1, 0])
        couple.extend([ci, cj])
    n = len(nodes)
    C = [[0] * n for _ in range(n)]
    for k in range(n):
        C[k][k] = diag[k]
        if k:
            C[0][k] = C[k][0] = couple[k]
    return QuiverModel(tuple(nodes), tuple(tuple(r) for r in C), f, bp)


def quiver_matrix(model: QuiverModel) -> tuple[list[str], list[list[int]]]:
    return model.labels(), [list(r) for r in model.C]


def _components(model: QuiverModel) -> list[list[int]]:
    p = model.principal
    rest = [k for k in range(len(model.nodes)) if k != p]
    seen: set[int] = set()
    comps = []
    for k in rest:
        if k in seen:
            continue
        stack, comp = [k], []
        seen.add(k)
        while stack:
            a = stack.pop()
            comp.append(a)
            for b in rest:
                if b not in seen and model.C[a][b] != 0:
                    seen.add(b)
                    stack.append(b)
        comps.append(sorted(comp))
    return comps


def _component_sum(model: QuiverModel, comp: list[int], n: int, t_trunc: int) -> QLaurent:
    """Brute-force sum over one coupled component with the principal degree fixed at n."""
    C, p = model.C, model.principal
    for a in comp:
        for b in comp:
            if a != b and C[a][b] < 0:
                raise NonTerminating("negative couplings inside a component are not enumerable")
    lin = {a: model.nodes[a].t_power + 2 * C[p][a] * n for a in comp}
    for a in comp:
        if C[a][a] < 0 or (C[a][a] == 0 and lin[a] <= 0):
            raise NonTerminating(f"node {model.nodes[a].label} has no positive t-grading")

    def own(a, d):
        return C[a][a] * d * d + lin[a] * d

    def cap(a, bound):
        d = 0
        while own(a, d + 1) < bound or own(a, d + 1) <= own(a, d):
            d += 1
        return d

    floor = {a: min(own(a, d) for d in range(cap(a, 0) + 2)) for a in comp}
    slack = sum(floor.values())
    caps = {a: cap(a, t_trunc - (slack - floor[a])) for a in comp}
    variables = {a: model.nodes[a].variable().shift(2 * C[p][a] * n) for a in comp}
    qq = QLaurent.t(2)
    total = QLaurent.zero(t_trunc)
    degs = [0] * len(comp)

    def rec(idx: int):
        nonlocal total
        if idx == len(comp):
            quad = 0
            term = QLaurent.one()
            for i, a in enumerate(comp):
                d = degs[i]
                quad += C[a][a] * d * d
                for j in range(i + 1, len(comp)):
                    quad += 2 * C[a][comp[j]] * d * degs[j]
                if d:
                    term = term * variables[a] ** d
            lower = quad + sum(min(0, model.nodes[a].t_power + 2 * C[p][a] * n) * degs[i] for i, a in enumerate(comp))
            if lower >= t_trunc and any(degs):
                return
            for i, a in enumerate(comp):
                if degs[i]:
                    term = term * inv_poch_finite(qq, degs[i], t_trunc - lower)
            total = total + term.shift(quad)
            return
        for d in range(caps[comp[idx]] + 1):
            degs[idx] = d
            rec(idx + 1)
        degs[idx] = 0

    rec(0)
    return total


def _node_series(model: QuiverModel, a: int, n: int, t_trunc: int) -> QLaurent:
    """sum_d (var t^(2 C_pa n))^d t^(C_aa d^2) / (q;q)_d for an isolated node."""
    C, p = model.C, model.principal
    nd = model.nodes[a]
    caa, lin = C[a][a], nd.t_power + 2 * C[p][a] * n
    if caa < 0 or (caa == 0 and lin <= 0):
        raise NonTerminating(f"node {nd.label} has t-order {lin} with no quadratic growth")
    var = nd.variable().shift(2 * C[p][a] * n)
    total = QLaurent.zero(t_trunc)
    power = QLaurent.one()
    d = 0
    while True:
        order = caa * d * d + lin * d
        if order >= t_trunc and d > 0 and caa * (2 * d + 1) + lin > 0:
            break
        total = total + (power * inv_poch_finite(QLaurent.t(2), d, t_trunc - order)).shift(caa * d * d)
        power = power * var
        d += 1
    return total


def quiver_eval(model: QuiverModel, N: int, t_trunc: int) -> XSeries:
    """Nahm sum up to X^N; X^n is known to t-order (its principal weight) + t_trunc."""
    p = model.principal
    pn = model.nodes[p]
    cpp = model.C[p][p]
    comps = _components(model)
    coeffs = []
    for n in range(N + 1):
        base = cpp * n * n + pn.t_power * n
        acc = (QLaurent.monomial(pn.sign ** n) * inv_poch_finite(QLaurent.t(2), n, t_trunc))
        if n == 0:
            acc = QLaurent.one().truncate(t_trunc)
        for comp in comps:
            if len(comp) == 1:
                part = _node_series(model, comp[0], n, t_trunc)
            else:
                part = _component_sum(model, comp, n, t_trunc)
            acc = acc * part
        if pn.param is not None:
            acc = acc * (QLaurent.param(pn.param) if isinstance(pn.param, str) else pn.param) ** n
        coeffs.append(acc.truncate(t_trunc).shift(base))
    return XSeries(coeffs, Direction.ASCENDING_X)


def export_record(model: QuiverModel) -> dict:
    labels, C = quiver_matrix(model)
    return {
        "framing": model.framing,
        "basepoint": model.basepoint.value,
        "nodes": [nd.as_record() for nd in model.nodes],
        "labels": labels,
        "matrix": C,
    }
