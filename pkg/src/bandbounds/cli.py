"""Command-line interface.

Examples::

    bandbounds bounds --random 4 3 --seed 1
    bandbounds charpoly --potential cell.json --out p.json
    bandbounds bands --random 4 3 --seed 1 --grid 60 --out bands.csv
    bandbounds levelset --random 4 3 --seed 1 --band 1 --lambda -4.5
    bandbounds verify --random 4 3 --seed 1

Exit status: 0 when every check passes, 1 on a failed check, 2 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .algebra import LaurentPoly2, UniPolyLambda, as_rational, specialize_lambda
from .bands import band_grid, count_level_set, find_extrema
from .floquet import Period, Potential, charpoly
from .polytope import CoprimalityError, area2, bounds_report, diamond, mixed_volume, newton_polytope
from .verify import DEFAULT_LAMBDAS, check_level_sets, run_verify

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    """Malformed potential file or command-line value."""


# -- potentials ---------------------------------------------------------------


def _parse_entry(value: Any, m: int, n: int) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str, Decimal)):
        raise InputError(f"row {m}, column {n}: expected an integer, decimal or 'p/q' string, got {value!r}")
    try:
        return as_rational(value)
    except (ValueError, ZeroDivisionError, ArithmeticError) as exc:
        raise InputError(f"row {m}, column {n}: cannot parse {value!r} as a rational ({exc})") from None


def potential_from_document(doc: dict) -> Potential:
    """Build a Potential from ``{"q1": .., "q2": .., "values": [[..], ..]}``."""
    try:
        q1, q2, rows = doc["q1"], doc["q2"], doc["values"]
    except (KeyError, TypeError):
        raise InputError("potential file needs keys 'q1', 'q2' and 'values'") from None
    if not isinstance(q1, int) or not isinstance(q2, int):
        raise InputError("q1 and q2 must be integers")
    if q1 < 3 or q2 < 3:
        raise InputError(f"periods must satisfy q1 >= 3 and q2 >= 3, got ({q1}, {q2})")
    if not isinstance(rows, list) or len(rows) != q1:
        raise InputError(f"dimension mismatch: expected {q1} rows, got {len(rows) if isinstance(rows, list) else rows!r}")
    table = []
    for m, row in enumerate(rows, start=1):
        if not isinstance(row, list) or len(row) != q2:
            raise InputError(f"dimension mismatch: row {m} must have {q2} entries")
        table.append([_parse_entry(v, m, n) for n, v in enumerate(row, start=1)])
    return Potential.from_rows(table, q1, q2)


def parse_potential(path) -> Potential:
    """Read a potential file; decimals are kept exact (0.1 means 1/10)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read potential file {path}: {exc}") from None
    try:
        doc = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None
    return potential_from_document(doc)


def generate_potential(q1: int, q2: int, seed: int) -> Potential:
    """Seeded integer potential with values in [-3, 3]."""
    rng = random.Random(seed)
    return Potential.from_rows([[rng.randint(-3, 3) for _ in range(q2)] for _ in range(q1)])


def potential_document(p: Potential) -> dict:
    return {"q1": p.period.q1, "q2": p.period.q2, "values": p.rows_as_strings()}


# -- serialization ------------------------------------------------------------


def charpoly_document(poly: LaurentPoly2, period: Period) -> dict:
    return {
        "q1": period.q1,
        "q2": period.q2,
        "lambda_degree": poly.lambda_degree,
        "terms": [
            {"e1": e1, "e2": e2, "lambda_coeffs": [str(c) for c in coeff.coeffs]}
            for (e1, e2), coeff in poly.terms.items()
        ],
    }


def charpoly_from_document(doc: dict) -> LaurentPoly2:
    """Inverse of :func:`charpoly_document` (accepts a full CLI document too)."""
    if "charpoly" in doc:
        doc = doc["charpoly"]
    return LaurentPoly2({(t["e1"], t["e2"]): UniPolyLambda(Fraction(c) for c in t["lambda_coeffs"]) for t in doc["terms"]})


def _plain(obj):
    """Convert numpy scalars/arrays and dataclass-like objects to JSON types."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if hasattr(obj, "as_dict"):
        return _plain(obj.as_dict())
    return obj


def dumps(doc: dict) -> str:
    return json.dumps(_plain(doc), indent=2, allow_nan=False) + "\n"


# -- argument handling ---------------------------------------------------------


def _lambda_arg(text: str) -> Fraction:
    try:
        return as_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid lambda {text!r}; use a decimal or 'p/q'") from None


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--potential", metavar="PATH", help="potential file (JSON)")
    src.add_argument("--random", nargs=2, type=int, metavar=("Q1", "Q2"), help="seeded random potential")
    src.add_argument("--period", nargs=2, type=int, metavar=("Q1", "Q2"), help="period only (bounds)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--grid", type=int, default=120, metavar="G")
    common.add_argument("--lambda", dest="lam", type=_lambda_arg, default=None, metavar="X")
    common.add_argument("--band", type=int, default=None, metavar="M")
    common.add_argument("--tol-f", type=float, default=1e-8)
    common.add_argument("--tol-grad", type=float, default=1e-4)
    common.add_argument("--out", default=None, metavar="PATH")
    common.add_argument("--format", choices=("json", "csv"), default=None)

    parser = argparse.ArgumentParser(prog="bandbounds", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("charpoly", parents=[common], help="exact characteristic Laurent polynomial")
    sub.add_parser("polytope", parents=[common], help="support and Newton polygon")
    b = sub.add_parser("bounds", parents=[common], help="level-set cardinality bounds")
    b.add_argument("--geometric", action="store_true", help="also compute MV(N, N) from the charpoly")
    sub.add_parser("bands", parents=[common], help="band values on the grid (CSV)")
    sub.add_parser("extrema", parents=[common], help="refined band extrema")
    sub.add_parser("levelset", parents=[common], help="count a level set of one band")
    v = sub.add_parser("verify", parents=[common], help="run every check")
    v.add_argument("--no-level-sets", action="store_true", help="skip the numerical level-set checks")
    r = sub.add_parser("report", parents=[common], help="everything in one document")
    r.add_argument("--no-level-sets", action="store_true")
    return parser


def _potential(args) -> Potential:
    if args.potential:
        return parse_potential(args.potential)
    if args.random:
        q1, q2 = args.random
        if q1 < 3 or q2 < 3:
            raise InputError(f"periods must satisfy q1 >= 3 and q2 >= 3, got ({q1}, {q2})")
        return generate_potential(q1, q2, args.seed)
    if args.period:
        raise InputError("this subcommand needs a potential: use --potential PATH or --random Q1 Q2")
    raise InputError("missing potential: use --potential PATH or --random Q1 Q2 [--seed N]")


def _input_echo(args, potential: Potential | None, period: Period | None = None) -> dict:
    echo: dict = {"command": args.command}
    if args.potential:
        echo["source"] = {"potential_file": str(args.potential)}
    elif args.random:
        echo["source"] = {"random": list(args.random), "seed": args.seed}
    if potential is not None:
        echo["potential"] = potential_document(potential)
    elif period is not None:
        echo["period"] = [period.q1, period.q2]
    echo["grid"] = args.grid
    if args.lam is not None:
        echo["lambda"] = str(args.lam)
    if args.band is not None:
        echo["band"] = args.band
    echo["tol_f"] = args.tol_f
    echo["tol_grad"] = args.tol_grad
    return echo


def _document(args, potential, period=None, **sections) -> dict:
    doc = {"tool": "bandbounds", "version": __version__, "input": _input_echo(args, potential, period)}
    doc.update(sections)
    return doc


def _bands_csv(potential: Potential, G: int) -> str:
    grid = band_grid(potential, G)
    Q = potential.period.Q
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k1", "k2"] + [f"lambda_{j}" for j in range(1, Q + 1)])
    for i in range(G):
        for j in range(G):
            w.writerow([repr(i / G), repr(j / G)] + [repr(float(x)) for x in grid.values[i, j]])
    return buf.getvalue()


def _polytope_section(potential: Potential, lam: Fraction) -> dict:
    poly = charpoly(potential)
    spec = specialize_lambda(poly, lam)
    n = newton_polytope(spec)
    q1, q2 = potential.period.q1, potential.period.q2
    return {
        "lambda": str(lam),
        "support_all_lambda": [list(e) for e in poly.support()],
        "support": [list(e) for e in spec.support()],
        "hull_vertices": [list(v) for v in n.vertices],
        "area2": area2(n),
        "mixed_volume_NN": mixed_volume(n, n) if not n.degenerate else None,
        "is_diamond": n == diamond(q1, q2),
    }


def _extrema_section(potential: Potential, G: int, band) -> list:
    bands = [band] if band else range(1, potential.period.Q + 1)
    out = []
    for m in bands:
        out.extend(r.as_dict() for r in find_extrema(potential, m, G))
    return out


def _check_band(potential: Potential, band):
    if band is not None and not 1 <= band <= potential.period.Q:
        raise InputError(f"--band must lie in 1..{potential.period.Q}")


def run(args) -> tuple[str, int]:
    cmd = args.command
    if cmd == "bounds":
        if args.period:
            period, potential = Period(*args.period), None
        else:
            potential = _potential(args)
            period = potential.period
        support = charpoly(potential) if (args.geometric and potential is not None) else None
        report = bounds_report(period, support)
        return dumps(_document(args, potential, period, bounds=report.as_dict())), EXIT_OK

    potential = _potential(args)
    _check_band(potential, args.band)
    if cmd == "charpoly":
        doc = _document(args, potential, charpoly=charpoly_document(charpoly(potential), potential.period))
        return dumps(doc), EXIT_OK
    if cmd == "polytope":
        lam = args.lam if args.lam is not None else Fraction(0)
        return dumps(_document(args, potential, polytope=_polytope_section(potential, lam))), EXIT_OK
    if cmd == "bands":
        if args.format == "json":
            grid = band_grid(potential, args.grid)
            return dumps(_document(args, potential, bands={"G": args.grid, "values": grid.values})), EXIT_OK
        return _bands_csv(potential, args.grid), EXIT_OK
    if cmd == "extrema":
        return dumps(_document(args, potential, extrema=_extrema_section(potential, args.grid, args.band))), EXIT_OK
    if cmd == "levelset":
        if args.band is None or args.lam is None:
            raise InputError("levelset needs --band M and --lambda X")
        rep = count_level_set(potential, args.band, float(args.lam), args.grid, tol_f=args.tol_f, tol_grad=args.tol_grad)
        return dumps(_document(args, potential, level_set=rep.as_dict())), (EXIT_OK if rep.passed else EXIT_FAIL)
    if cmd in ("verify", "report"):
        lambdas = [args.lam] if args.lam is not None else DEFAULT_LAMBDAS
        verdicts, extra = run_verify(
            potential, args.grid, lambdas, level_sets=not args.no_level_sets, tol_f=args.tol_f, tol_grad=args.tol_grad
        )
        sections: dict = {"verdicts": verdicts.as_dict()}
        if cmd == "report":
            poly = charpoly(potential)
            sections = {
                "charpoly": charpoly_document(poly, potential.period),
                "polytope": _polytope_section(potential, lambdas[0]),
                "bounds": bounds_report(potential.period).as_dict() if potential.period.coprime else None,
                "extrema": [r.as_dict() for r in extra["extrema"]],
                "level_sets": [r.as_dict() for r in extra["level_sets"]],
                **sections,
            }
        code = EXIT_OK if verdicts.status == "pass" else EXIT_FAIL
        return dumps(_document(args, potential, **sections)), code
    raise InputError(f"unknown command {cmd}")


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        text, code = run(args)
    except CoprimalityError as exc:
        print(f"bandbounds: {exc} (the bounds hold under the coprimality hypothesis gcd(q1, q2) = 1)", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, ValueError) as exc:
        print(f"bandbounds: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
