"""Command line entry point: ``qstrip <command> --config job.json``."""

from __future__ import annotations

import argparse
import cmath
import io
import json
import logging
import sys

from .barnes import numeric_report, numeric_values, residue_terms, symbolic_integrand
from .config import FORMATS, JobConfig, load_config
from .dt import product_decompose
from .errors import ConfigInvalid, ConvergenceBudget, QStripError
from .geometry import classical_curve, curve_eval, parametrize, saddle_potential
from .quantization import build_quantum_curve, default_direction, frobenius_solve
from .quiver import export_record, to_quiver
from .series import Direction, XSeries
from .verify import run_verify

COMMANDS = ("solve", "quiver", "dt", "barnes", "classical", "verify")


def _cnum(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _solve_series(cfg: JobConfig) -> tuple[XSeries, Direction]:
    geom = cfg.geom
    op = build_quantum_curve(geom, cfg.basepoint)
    direction = default_direction(geom, cfg.basepoint)
    return frobenius_solve(op, direction, cfg.x_order, cfg.t_order), direction


def cmd_solve(cfg: JobConfig) -> tuple[dict, list[list]]:
    psi, direction = _solve_series(cfg)
    rows = [{"n": n, "t_order": psi[n].trunc, "coefficient": psi[n].poly_str()} for n in psi.degrees()]
    record = {"direction": direction.value, "rows": rows}
    table = [["n", "t_order", "coefficient"]] + [[r["n"], r["t_order"], r["coefficient"]] for r in rows]
    return record, table


def cmd_quiver(cfg: JobConfig) -> tuple[dict, list[list]]:
    model = to_quiver(cfg.geom, cfg.basepoint)
    record = export_record(model)
    labels, C = record["labels"], record["matrix"]
    table = [["node"] + labels] + [[lab] + row for lab, row in zip(labels, C)]
    return record, table


def cmd_dt(cfg: JobConfig) -> tuple[dict, list[list]]:
    psi, _ = _solve_series(cfg)
    if psi.direction is not Direction.ASCENDING_X:
        raise ConfigInvalid("DT extraction needs the ascending-X series")
    fac = product_decompose(psi, cfg.x_order)
    rows = fac.rows()
    record = {"N": fac.N, "all_integral": fac.all_integral(), "factors": rows}
    cols = ["d", "monomial", "s", "e", "integral"]
    table = [cols] + [[r[c] for c in cols] for r in rows]
    return record, table


def _numeric_geom(cfg: JobConfig):
    geom = cfg.numeric_geom()
    if geom is None:
        raise ConfigInvalid("symbolic parameters need numeric.values for this command")
    return geom


def cmd_barnes(cfg: JobConfig) -> tuple[dict, list[list]]:
    nb = cfg.numeric
    if nb is None:
        raise ConfigInvalid("barnes needs a numeric block with q and x")
    geom = _numeric_geom(cfg)
    ig = symbolic_integrand(geom, cfg.basepoint)
    record: dict = {"integrand": ig.name, "geometry": geom.label(), "f": geom.f, "bp": cfg.basepoint.value,
                    "q": nb.q, "x": [nb.x, 0.0], "N": nb.terms, "Nres": nb.residues}
    try:
        rep = numeric_report(geom, cfg.basepoint, nb.x, nb.q, nb.terms, nb.residues)
    except ConvergenceBudget as exc:
        # divergent regimes (e.g. f <= -2) are reported, not hidden
        record.update({"converged": False, "reason": str(exc)})
    else:
        record.update(rep.as_record())
        record["converged"] = True
    n0 = residue_terms(ig, nb.x, nb.q, 0, numeric_values(geom))[0]
    record["n0_residue"] = _cnum(n0)
    table = [["key", "value"]] + [[k, json.dumps(record[k])] for k in sorted(record)]
    return record, table


def cmd_classical(cfg: JobConfig) -> tuple[dict, list[list]]:
    geom = cfg.geom
    record: dict = {"curve": str(classical_curve(geom)), "samples": [], "saddle": None}
    ngeom = cfg.numeric_geom()
    if ngeom is not None:
        for k in range(8):
            z = 0.35 * cmath.exp(0.7j * (k + 1))
            x, y = parametrize(ngeom, z)
            res = abs(curve_eval(ngeom, cmath.exp(x), cmath.exp(y)))
            record["samples"].append({"z": _cnum(z), "x": _cnum(x), "y": _cnum(y), "residual": res})
        if cfg.numeric is not None:
            sr = saddle_potential(ngeom, complex(cfg.numeric.x))
            record["saddle"] = {
                "x": _cnum(sr.x),
                "critical_points": [_cnum(z) for z in sr.critical_points],
                "residuals": sr.curve_residuals(ngeom),
                "collision": sr.collision,
            }
    table = [["key", "value"]] + [[k, json.dumps(record[k], sort_keys=True)] for k in sorted(record)]
    return record, table


def cmd_verify(cfg: JobConfig) -> tuple[dict, list[list]]:
    rep = run_verify(cfg)
    record = rep.as_record()
    table = [["property", "status", "detail"]] + [[r.name, r.status, r.detail] for r in rep.results]
    return record, table


HANDLERS = {
    "solve": cmd_solve,
    "quiver": cmd_quiver,
    "dt": cmd_dt,
    "barnes": cmd_barnes,
    "classical": cmd_classical,
    "verify": cmd_verify,
}


def render(command: str, cfg: JobConfig, record: dict, table: list[list]) -> str:
    if cfg.format == "tsv":
        buf = io.StringIO()
        for row in table:
            buf.write("\t".join(str(c) for c in row) + "\n")
        return buf.getvalue()
    doc = {"command": command, "config": cfg.to_dict(), "result": record}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def run(command: str, cfg: JobConfig) -> tuple[int, str]:
    """Run one command; returns (exit status, rendered output)."""
    if command not in HANDLERS:
        raise ConfigInvalid(f"unknown command {command!r}")
    record, table = HANDLERS[command](cfg)
    status = 0
    if command == "verify" and not record["ok"]:
        status = 1
    return status, render(command, cfg, record, table)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qstrip", description="Strip-geometry wave functions, quivers and DT invariants.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="job configuration (JSON)")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--format", choices=FORMATS, help="override the config's output format")
    p.add_argument("--x-order", type=int, help="override truncation.x_order")
    p.add_argument("--t-order", type=int, help="override truncation.t_order")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        cfg = load_config(args.config).with_overrides(args.x_order, args.t_order, args.format)
        status, text = run(args.command, cfg)
    except ConfigInvalid as exc:
        print(f"qstrip: config error: {exc}", file=sys.stderr)
        return 2
    except QStripError as exc:
        print(f"qstrip: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
