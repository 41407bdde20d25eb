"""Error of the truncated hbar-expansion of the dual wave function.

    python3 scripts/hbar_decay.py [--z 0.2]

Halving hbar should shrink the order-G error by about 2^(G+1) for even G.
"""

import argparse

from qstrip.dual import hbar_decay
from qstrip.geometry import StripGeometry


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--z", type=float, default=0.2)
    args = ap.parse_args()
    geoms = [StripGeometry.c3(1), StripGeometry.conifold(0, 0.1), StripGeometry((0.1,), (0.3,), 1)]
    hbars = (-0.2, -0.1, -0.05, -0.025)
    for geom in geoms:
        print(f"{geom.label()} f={geom.f}")
        for G in (0, 2, 4):
            errs, _ = hbar_decay(geom, args.z, G=G, hbars=hbars)
            ratios = [errs[i] / errs[i + 1] for i in range(len(errs) - 1)]
            print(f"  G={G}  errors " + " ".join(f"{e:.2e}" for e in errs)
                  + "  ratios " + " ".join(f"{r:.2f}" for r in ratios))
        print()


if __name__ == "__main__":
    main()
