"""Residue-sum reconstruction of the series as the number of poles grows.

    python3 scripts/residue_convergence.py [--q 0.3] [--x -2]
"""

import argparse

from qstrip.barnes import numeric_psi, numeric_values, residue_terms, symbolic_integrand
from qstrip.geometry import StripGeometry
from qstrip.quantization import Basepoint


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--q", type=float, default=0.3)
    ap.add_argument("--x", type=float, default=-2.0)
    ap.add_argument("--poles", type=int, default=12)
    args = ap.parse_args()
    cases = [(StripGeometry.c3(1), Basepoint.INF), (StripGeometry.c3(1), Basepoint.ONE),
             (StripGeometry.conifold(-1, 0.1), Basepoint.INF), (StripGeometry.conifold(0, 0.1), Basepoint.ONE)]
    for geom, bp in cases:
        target = numeric_psi(geom, bp, args.x, args.q, 40)
        terms = residue_terms(symbolic_integrand(geom, bp), args.x, args.q, args.poles, numeric_values(geom))
        print(f"{geom.label()} f={geom.f} bp={bp.value}  series = {target:.15g}")
        partial = 0j
        for n, r in enumerate(terms):
            partial += r
            print(f"  poles 0..{n:<3d} |delta| = {abs(partial - target):.3e}")
        print()


if __name__ == "__main__":
    main()
