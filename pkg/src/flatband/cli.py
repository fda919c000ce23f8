"""Command-line front end: ``flatband <command> [flags]``.

Energies are in units of ``m`` and lengths in units of ``1/m``; every CSV
header carries the unit of its column. Floats are written with 12
significant digits so repeated runs are byte-identical.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import analytic, generic, greens, validation
from .exceptions import FlatbandError
from .model import BandIndex, ModelParams, dispersion
from .potentials import (
    Delta,
    PiecewiseConstant,
    Segment,
    SquareWell,
    potential_from_dict,
    potential_to_dict,
    singular_energies,
)
from .spectrum import UNITS, SpectrumTable, fmt, jnum

TABLE_SCHEMA = "flatband.table/1"
BOUND_SCHEMA = "flatband.bound/1"
REPORT_SCHEMA = "flatband.validation/1"
SOLVERS = ("analytic", "generic")


# ------------------------------------------------------------------ output
def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _table(columns, rows, fmt_name, metadata=None) -> str:
    if fmt_name == "csv":
        return _csv(columns, [[fmt(v) if not isinstance(v, str) else v for v in r] for r in rows])
    body = [[jnum(v) if isinstance(v, (float, np.floating)) else v for v in r] for r in rows]
    return _json({"schema": TABLE_SCHEMA, "units": UNITS, "columns": list(columns),
                  "rows": body, "metadata": metadata or {}})


def _grid(lo: float, hi: float, n: int) -> np.ndarray:
    g = lo + (hi - lo) * np.arange(n) / max(n - 1, 1)
    g[np.abs(g) < 1e-14 * max(abs(lo), abs(hi), 1.0)] = 0.0
    return g


def _parse_sweep(text: str):
    try:
        lo, hi, steps = text.split(":")
        return float(lo), float(hi), int(steps)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"sweep must look like lo:hi:steps, got {text!r}") from exc


# ---------------------------------------------------------------- commands
def cmd_dispersion(args, params: ModelParams) -> str:
    ks = _grid(args.k_min, args.k_max, args.points)
    rows = [[k] + [float(dispersion(params, b, k)) for b in (BandIndex.LOWER, BandIndex.FLAT, BandIndex.UPPER)]
            for k in ks]
    return _table(("k[m]", "E_lower[m]", "E_flat[m]", "E_upper[m]"), rows, args.format)


def cmd_dos(args, params: ModelParams) -> str:
    rows, excluded = [], []
    for E in _grid(args.e_min, args.e_max, args.points):
        if abs(abs(E) - params.m) < 1e-9 * params.m:
            excluded.append(jnum(E))
            continue
        d = greens.dos(params, E)
        rows.append([E, d.continuum, int(d.flat_weight)])
    if excluded:
        print(f"excluded threshold energies: {excluded}", file=sys.stderr)
    return _table(("E[m]", "continuum_dos[1/(m*length)]", "flat_flag"), rows, args.format,
                  {"excluded_energies": excluded})


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def cmd_green(args, params: ModelParams) -> str:
    z = args.z
    rows = []
    if args.k is not None:
        G = greens.green_momentum(params, args.k, z)
        for i in range(3):
            for j in range(3):
                rows.append([i + 1, j + 1, G[i, j].real, G[i, j].imag, 0.0, 0.0])
    else:
        g = greens.green_coordinate(params, args.x, args.xp, z)
        for i in range(3):
            for j in range(3):
                r, d = g.regular[i, j], g.delta_coeff[i, j]
                rows.append([i + 1, j + 1, r.real, r.imag, d.real, d.imag])
    cols = ("row", "col", "regular_re[1]", "regular_im[1]", "delta_re[1/m]", "delta_im[1/m]")
    meta = {"z": [jnum(z.real), jnum(z.imag)], "k": jnum(args.k),
            "x": jnum(args.x), "xp": jnum(args.xp)}
    return _table(cols, rows, args.format, meta)


def build_potential(args):
    """Potential from ``--potential`` (inline JSON or a file), ``--g`` or
    the ``--v11/--v22/--v33`` square-well flags; ``None`` if none given."""
    if args.potential:
        text = args.potential
        if not text.lstrip().startswith("{"):
            text = Path(text).read_text()
        return potential_from_dict(json.loads(text))
    if args.g is not None:
        return Delta(args.g)
    if any(v is not None for v in (args.v11, args.v22, args.v33)):
        return SquareWell(args.a, args.v11 or 0.0, args.v22 or 0.0, args.v33 or 0.0)
    return None


def scale_potential(p, s: float):
    """Multiply every strength of ``p`` by ``s``."""
    if isinstance(p, Delta):
        return Delta(p.g * s, p.x0)
    if isinstance(p, SquareWell):
        return SquareWell(p.a, p.v11 * s, p.v22 * s, p.v33 * s, p.center)
    return PiecewiseConstant(tuple(Segment(x.x_left, x.x_right, x.v11 * s, x.v22 * s, x.v33 * s)
                                   for x in p.segments))


def _solve(params, p, solver, n_max) -> SpectrumTable:
    if solver == "analytic":
        return analytic.find_bound_states(params, p, n_max=n_max)
    return generic.solve_generic(params, p, n_max=n_max)


def cmd_bound(args, params: ModelParams) -> str:
    p = build_potential(args)
    if p is None:
        raise FlatbandError("bound needs a potential (--potential, --g or --v11/--v22/--v33)")
    solvers = SOLVERS if args.solver == "both" else (args.solver,)
    if args.sweep is None:
        tables = {s: _solve(params, p, s, args.n_max) for s in solvers}
        for s, t in tables.items():
            for note in t.notes:
                print(f"{s}: {note}", file=sys.stderr)
        if args.format == "csv":
            rows = [r for t in tables.values() for r in t.rows()]
            return _csv(SpectrumTable.CSV_COLUMNS, rows)
        return _json({"schema": BOUND_SCHEMA, "units": UNITS, "params": {"m": jnum(params.m)},
                      "potential": potential_to_dict(p), "n_max": args.n_max,
                      "solvers": {s: t.to_dict() for s, t in tables.items()}})
    lo, hi, steps = args.sweep
    rows, excluded, truncated = [], [], False
    for s in _grid(lo, hi, steps):
        if s == 0.0:
            excluded.append({"scale": 0.0, "reason": "zero strength has no bound state"})
            continue
        q = scale_potential(p, s)
        for solver in solvers:
            t = _solve(params, q, solver, args.n_max)
            truncated |= t.truncated
            rows += t.records(extra=[jnum(s)])
    if truncated:
        print(f"infinite families truncated at n_max={args.n_max}", file=sys.stderr)
    cols = ("scale[1]",) + SpectrumTable.CSV_COLUMNS
    meta = {"template": potential_to_dict(p), "sweep": [jnum(lo), jnum(hi), steps],
            "excluded": excluded, "truncated": truncated, "n_max": args.n_max,
            "singular_energies_of_template": [jnum(e) for e in singular_energies(p, params).points]}
    if args.format == "csv":
        return _csv(cols, [[v if isinstance(v, str) else fmt(v) for v in r] for r in rows])
    return _json({"schema": TABLE_SCHEMA, "units": UNITS, "columns": list(cols), "rows": rows,
                  "metadata": meta})


def cmd_validate(args, params: ModelParams) -> tuple[str, int]:
    results = validation.run_suite(args.suite)
    failed = [r for r in results if not r.passed]
    if args.json:
        text = _json({"schema": REPORT_SCHEMA, "suite": args.suite, "passed": not failed,
                      "checks": [r.to_dict() for r in results]})
    else:
        text = "".join(r.line() + "\n" for r in results)
        text += f"{len(results) - len(failed)}/{len(results)} criteria passed\n"
    return text, 1 if failed else 0


# ------------------------------------------------------------------ parser
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--m", type=float, default=1.0, help="gap parameter (energy unit)")
    common.add_argument("--out", help="write to this file instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = argparse.ArgumentParser(prog="flatband", description="Bound states of a flat-band spin-1 Dirac model.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dispersion", parents=[common], help="three band energies on a k grid")
    p.add_argument("--k-min", type=float, default=-3.0)
    p.add_argument("--k-max", type=float, default=3.0)
    p.add_argument("--points", type=int, default=601)

    p = sub.add_parser("dos", parents=[common], help="free density of states on an energy grid")
    p.add_argument("--e-min", type=float, default=-3.0)
    p.add_argument("--e-max", type=float, default=3.0)
    p.add_argument("--points", type=int, default=601)

    p = sub.add_parser("green", parents=[common], help="free Green function matrix")
    p.add_argument("--z", type=_parse_complex, required=True, help="complex energy, e.g. 0.5+0.5j")
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--xp", type=float, default=0.0)
    p.add_argument("--k", type=float, default=None, help="momentum; selects the k-space form")

    p = sub.add_parser("bound", parents=[common], help="bound-state spectrum")
    p.add_argument("--potential", help="inline JSON or path to a JSON potential file")
    p.add_argument("--g", type=float, help="delta strength g in V22 = g delta(x)")
    p.add_argument("--a", type=float, default=1.0, help="square well width")
    p.add_argument("--v11", type=float)
    p.add_argument("--v22", type=float)
    p.add_argument("--v33", type=float)
    p.add_argument("--n-max", type=int, default=20, help="largest family quantum number kept")
    p.add_argument("--sweep", type=_parse_sweep, help="scale strengths over lo:hi:steps")
    p.add_argument("--solver", choices=("analytic", "generic", "both"), default="both")

    p = sub.add_parser("validate", parents=[common], help="run acceptance checks")
    p.add_argument("--suite", choices=tuple(validation.SUITES), default="all")
    p.add_argument("--json", action="store_true", help="machine-readable report")
    return parser


COMMANDS = {"dispersion": cmd_dispersion, "dos": cmd_dos, "green": cmd_green, "bound": cmd_bound}


def _join_negative_values(argv):
    """Let ``--sweep -3:3:61`` through argparse, which would read ``-3:3:61``
    as an option."""
    out, it = [], iter(argv)
    for tok in it:
        if tok == "--sweep":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--sweep={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(_join_negative_values(sys.argv[1:] if argv is None else list(argv)))
    try:
        params = ModelParams(args.m)
        if args.command == "validate":
            text, code = cmd_validate(args, params)
            _emit(text, args.out)
            return code
        _emit(COMMANDS[args.command](args, params), args.out)
    except (FlatbandError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"flatband: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
