"""``gcrit`` command line: bounds, table reproduction and the reference oracle.

Exit status: 0 success, 1 usage error, 2 numerical failure, 3 a reproduced
table cell disagrees with its stored value.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass

from . import classic_bounds as cb
from .errors import InputError, NumericError, UnknownMethod
from .oracle import critical_g, exponential_closed_form, square_well_closed_form
from .potential import resolve_potential
from .quadrature import QuadratureScheme
from .sequences import LOWER, SEQUENCE_METHODS, UPPER, best_bracket, sequence
from .tables import TABLE_IDS, reproduce_table, table_spec

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_MISMATCH = 0, 1, 2, 3

CLOSED_FORM_METHODS = ("glaser", "calogero1", "calogero2", "variational", "rayleigh", "chadan")
METHODS = tuple(SEQUENCE_METHODS) + CLOSED_FORM_METHODS
FIELDS = ("potential", "ell", "method", "n", "value", "bound_type", "provenance")


@dataclass(frozen=True)
class ResultRecord:
    potential: str
    ell: int
    method: str
    n: int | None
    value: float
    bound_type: str
    provenance: str


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_methods(text: str) -> list[str]:
    methods = [m.strip().lower() for m in text.split(",") if m.strip()]
    if not methods:
        raise UnknownMethod("no method given")
    for m in methods:
        if m not in METHODS:
            raise UnknownMethod(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
    return methods


def _closed_form(method, shape, ell, scheme, iters):
    if method == "glaser":
        return [(None, cb.glaser_lower(shape, ell, scheme=scheme), LOWER)]
    if method == "calogero1":
        return [(None, cb.calogero_upper_linear(shape, ell, scheme=scheme), UPPER)]
    if method == "calogero2":
        return [(None, cb.calogero_upper_nonlinear(shape, ell, scheme=scheme), UPPER)]
    if method == "variational":
        return [(None, cb.variational_upper_closed(shape, ell, scheme=scheme), UPPER)]
    if method == "chadan":
        return [(None, cb.chadan_upper(shape, ell, scheme=scheme), UPPER)]
    # rayleigh: the power-weighted family, at each iterate up to ``iters - 1``
    out = []
    for i in range(max(1, iters)):
        trial = cb.TrialFunctionSpec("power_weighted", iterations=i)
        out.append((i, cb.rayleigh_upper(shape, ell, trial, scheme=scheme), UPPER))
    return out


def cmd_bounds(potential: str, ell: int, methods: list[str], iters: int,
               scheme: QuadratureScheme) -> list[ResultRecord]:
    shape = resolve_potential(potential)
    label = shape.label
    records = []
    extra = []
    for method in methods:
        if method in SEQUENCE_METHODS:
            seq = sequence(method, shape, ell, iters, scheme=scheme)
            for n, value in zip(seq.indices, seq.bounds_on_gc):
                records.append(ResultRecord(label, ell, method, n, value, seq.direction, "sequence"))
        else:
            for n, value, direction in _closed_form(method, shape, ell, scheme, iters):
                records.append(ResultRecord(label, ell, method, n, value, direction, "closed-form"))
                extra.append((method, value, direction))
    bracket = best_bracket(shape, ell, iters, scheme=scheme, extra=extra)
    records.append(ResultRecord(label, ell, f"best:{bracket.sources[0]}", None,
                                bracket.lower, LOWER, "bracket"))
    records.append(ResultRecord(label, ell, f"best:{bracket.sources[1]}", None,
                                bracket.upper, UPPER, "bracket"))
    return records


def cmd_oracle(potential: str, ell: int) -> list[ResultRecord]:
    shape = resolve_potential(potential)
    records = [ResultRecord(shape.label, ell, "shooting", None, critical_g(shape, ell),
                            "exact", "oracle")]
    builtin = shape.meta.get("builtin")
    closed = None
    if builtin == "sw":
        closed = square_well_closed_form(ell)
    elif builtin == "exp" and ell == 0:
        closed = exponential_closed_form()
    if closed is not None:
        records.append(ResultRecord(shape.label, ell, "bessel-zero", None, closed,
                                    "exact", "closed-form"))
    return records


def _render_records(records: list[ResultRecord], fmt: str) -> str:
    rows = [asdict(r) for r in records]
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=FIELDS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({**row, "value": repr(row["value"]),
                             "n": "" if row["n"] is None else row["n"]})
        return buf.getvalue()
    lines = [f"{'potential':<14}{'ell':>4}  {'method':<22}{'n':>3}  {'value':>20}  {'type':<6} provenance"]
    for r in records:
        n = "" if r.n is None else str(r.n)
        lines.append(f"{r.potential:<14}{r.ell:>4}  {r.method:<22}{n:>3}  {r.value:>20.12g}  "
                     f"{r.bound_type:<6} {r.provenance}")
    return "\n".join(lines) + "\n"


def _render_table(table: int, cells, fmt: str) -> str:
    if fmt in ("json", "csv"):
        rows = [{"table": c.table, "row": c.row, "column": c.column, "stored": c.stored,
                 "computed": c.computed, "tolerance": c.tolerance, "pass": c.passed}
                for c in cells]
        if fmt == "json":
            return json.dumps(rows, indent=2) + "\n"
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({**row, "computed": repr(row["computed"])})
        return buf.getvalue()
    spec = table_spec(table)
    columns = spec["columns"]
    width = max(12, *(len(c) + 2 for c in columns))
    out = [f"Table {table}: {spec['title']}",
           f"{'potential':<12}" + "".join(f"{c:>{width}}" for c in columns)]
    for start in range(0, len(cells), len(columns)):
        chunk = cells[start:start + len(columns)]
        out.append(f"{chunk[0].row:<12}" + "".join(
            f"{c.rendered + ('' if c.passed else '*'):>{width}}" for c in chunk))
    failed = [c for c in cells if not c.passed]
    for c in failed:
        out.append(f"MISMATCH {c.row} {c.column}: computed {c.computed:.8g}, "
                   f"stored {c.stored}, |diff| {abs(c.difference):.3g} > {c.tolerance:.3g}")
    out.append(f"{len(cells) - len(failed)}/{len(cells)} cells within tolerance: "
               + ("PASS" if not failed else "FAIL"))
    return "\n".join(out) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gcrit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, potential=True):
        if potential:
            p.add_argument("--potential", default="sw",
                           help="sw, exp, pe or file:PATH (two columns: radius, value)")
            p.add_argument("--ell", type=int, default=0)
        p.add_argument("--format", choices=("text", "csv", "json"), default="text")
        p.add_argument("--tol", type=float, default=None,
                       help="quadrature relative tolerance (overrides GCRIT_TOL)")

    b = sub.add_parser("bounds", help="limits on the critical coupling")
    common(b)
    b.add_argument("--method", default=",".join(SEQUENCE_METHODS),
                   help="comma-separated subset of: " + ",".join(METHODS))
    b.add_argument("--iters", type=int, default=4)

    r = sub.add_parser("reproduce", help="recompute a stored reference table")
    common(r, potential=False)
    r.add_argument("--table", type=int, required=True, choices=TABLE_IDS)

    o = sub.add_parser("oracle", help="critical coupling by shooting")
    common(o)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        overrides = {} if args.tol is None else {"rel_tolerance": args.tol}
        scheme = QuadratureScheme.from_env(**overrides)
        if getattr(args, "ell", 0) < 0:
            raise InputError("--ell must be non-negative")
        if args.command == "bounds":
            if args.iters < 1:
                raise InputError("--iters must be at least 1")
            records = cmd_bounds(args.potential, args.ell, parse_methods(args.method),
                                 args.iters, scheme)
            sys.stdout.write(_render_records(records, args.format))
        elif args.command == "oracle":
            sys.stdout.write(_render_records(cmd_oracle(args.potential, args.ell), args.format))
        else:
            cells = reproduce_table(args.table, scheme)
            sys.stdout.write(_render_table(args.table, cells, args.format))
            if not all(c.passed for c in cells):
                return EXIT_MISMATCH
    except (InputError, ValueError) as exc:
        print(f"gcrit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"gcrit: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
