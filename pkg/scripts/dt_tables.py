"""Print DT exponent tables for the named strip examples at both basepoints.

    python3 scripts/dt_tables.py [--degree 4] [--t-order 12]
"""

import argparse

from qstrip.dt import product_decompose
from qstrip.errors import UnsupportedFraming
from qstrip.geometry import StripGeometry
from qstrip.quantization import Basepoint, closed_form_psi

EXAMPLES = [StripGeometry.c3(1), StripGeometry.c3(-2), StripGeometry.conifold(-1), StripGeometry.conifold(0)]


def table(geom, bp, N, T):
    try:
        psi = closed_form_psi(geom, bp, N, T)
    except UnsupportedFraming as exc:
        return f"  ({exc})"
    fac = product_decompose(psi, N)
    lines = [f"  {'d':>2} {'monomial':>10} {'s':>4} {'e':>6}"]
    for r in fac.rows():
        lines.append(f"  {r['d']:>2} {r['monomial']:>10} {r['s']:>4} {r['e']:>6}")
    lines.append(f"  all integral: {fac.all_integral()}")
    return "\n".join(lines)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--degree", type=int, default=4)
    ap.add_argument("--t-order", type=int, default=12)
    args = ap.parse_args()
    for geom in EXAMPLES:
        for bp in (Basepoint.INF, Basepoint.ONE):
            print(f"{geom.label()} f={geom.f} bp={bp.value}")
            print(table(geom, bp, args.degree, args.t_order))
            print()


if __name__ == "__main__":
    main()
