"""Command-line surface: enumerate the catalog, verify goldens, check files.

Exit codes: 0 success, 1 a verification or check failed, 2 bad usage or
unparseable input, 3 the enumeration hit the max-sides cap somewhere.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction
from pathlib import Path

from .core import (
    PolygonDatum,
    TableDecodeError,
    cartan_matrix,
    classify_flags,
    polygon_table,
    symmetrized_cartan,
    symmetry_group,
    verify_realization,
)
from .engine import (
    DEFAULT_MAX_SIDES,
    CatalogRecord,
    run_elliptic,
    run_parabolic,
)
from .goldens import (
    GoldenFormatError,
    cross_check,
    format_golden_block,
    format_rational,
    lattice_fixtures,
    parse_golden_text,
    self_check_catalog,
    verify_fixture,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_CAP = 3


def _record_json(rec: CatalogRecord) -> str:
    payload = {
        "r": format_rational(rec.r),
        "n": rec.n,
        "lambda": list(rec.lam),
        "pairings": list(rec.pairings),
        "polygon_table": [list(row) for row in rec.table],
        "cartan": [list(row) for row in rec.cartan],
        "symcartan": [list(row) for row in rec.symcartan],
        "sym_order": rec.sym_order,
        "compact": rec.compact,
        "untwisted": rec.untwisted,
        "type": rec.kind,
    }
    return json.dumps(payload)


def _record_table_block(rec: CatalogRecord) -> str:
    lines = [f"r = {format_rational(rec.r)}"]
    lines.extend(" ".join(str(v) for v in row) for row in rec.table)
    return "\n".join(lines)


def _emit_records(records, fmt: str, out) -> None:
    if fmt == "records":
        for rec in records:
            out.write(_record_json(rec) + "\n")
    else:
        blocks = [_record_table_block(rec) for rec in records]
        if blocks:
            out.write("\n\n".join(blocks) + "\n")


def _filtered(records, untwisted_only: bool, noncompact_only: bool):
    out = records
    if untwisted_only:
        out = [r for r in out if r.untwisted]
    if noncompact_only:
        out = [r for r in out if not r.compact]
    return list(out)


def cmd_enumerate(args) -> int:
    r_filter = None
    if args.r is not None:
        try:
            r_filter = Fraction(args.r)
        except (ValueError, ZeroDivisionError):
            print(f"error: bad rational for --r: {args.r!r}", file=sys.stderr)
            return EXIT_USAGE
    out = sys.stdout
    if args.mode == "elliptic":
        result = run_elliptic(
            args.lambda_max,
            args.max_sides,
            jobs=args.jobs,
            r_filter=r_filter,
        )
        records = _filtered(result.records, args.untwisted_only, args.noncompact_only)
        _emit_records(records, args.format, out)
        if result.cap_events:
            for ev in result.cap_events:
                print(
                    f"warning: chain cap {args.max_sides} hit at r={ev.r}",
                    file=sys.stderr,
                )
            return EXIT_CAP
        return EXIT_OK

    if r_filter not in (None, Fraction(0)):
        print("error: parabolic mode runs at r = 0 only", file=sys.stderr)
        return EXIT_USAGE
    report = run_parabolic(args.lambda_max, args.max_sides, jobs=args.jobs)
    records = _filtered(report.records, args.untwisted_only, args.noncompact_only)
    if args.format == "records":
        _emit_records(records, "records", out)
        for per in report.periodic:
            out.write(
                json.dumps(
                    {
                        "periodic": {
                            "period": per.period,
                            "signature": [list(w) for w in per.signature],
                            "length": per.length,
                            "lambda": list(per.lam),
                            "pairings": list(per.pairings),
                        }
                    }
                )
                + "\n"
            )
    else:
        _emit_records(records, "table", out)
        for per in report.periodic:
            out.write(
                f"# periodic: period={per.period} detected_at={per.length} "
                f"lambda={','.join(str(l) for l in per.lam)} "
                f"signature={per.signature}\n"
            )
    if report.capped_chains:
        print(
            f"warning: {report.capped_chains} chains truncated at "
            f"{args.max_sides} sides",
            file=sys.stderr,
        )
        return EXIT_CAP
    return EXIT_OK


def cmd_verify(args) -> int:
    failures = 0

    golden_rows = None
    if args.catalog is not None:
        try:
            golden_rows = tuple(parse_golden_text(Path(args.catalog).read_text()))
        except (OSError, GoldenFormatError) as exc:
            print(f"error: cannot read golden file: {exc}", file=sys.stderr)
            return EXIT_USAGE

    for check in self_check_catalog(golden_rows):
        mark = "ok" if check.passed else "FAIL"
        detail = f": {check.detail}" if (check.detail and not check.passed) else ""
        print(f"{mark:4s} catalog/{check.name}{detail}")
        failures += 0 if check.passed else 1

    for fixture in lattice_fixtures():
        report = verify_fixture(fixture)
        mark = "ok" if report.valid else "FAIL"
        detail = ""
        if not report.valid:
            detail = ": " + "; ".join(
                f"{c.name} ({c.detail})" for c in report.failures()
            )
        print(f"{mark:4s} fixture/{report.name}{detail}")
        failures += 0 if report.valid else 1

    if args.skip_engine:
        print("skip engine-vs-catalog cross-check")
    else:
        result = run_elliptic(6, DEFAULT_MAX_SIDES, jobs=args.jobs)
        report = cross_check(result.records, golden_rows)
        if report.ok:
            print(f"ok   engine/cross-check ({report.engine_count} records)")
        else:
            failures += 1
            print("FAIL engine/cross-check")
            for key in report.missing:
                print(f"     missing from engine: {key}")
            for key in report.extra:
                print(f"     extra in engine: {key}")
            for msg in report.mismatched:
                print(f"     {msg}")

    print(f"{'PASS' if failures == 0 else 'FAIL'}: {failures} failing checks")
    return EXIT_OK if failures == 0 else EXIT_FAIL


def _matrix_lines(name: str, rows) -> list[str]:
    out = [f"{name}:"]
    out.extend("  " + " ".join(f"{v:4d}" for v in row) for row in rows)
    return out


def cmd_check(args) -> int:
    try:
        text = Path(args.path).read_text()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        rows = parse_golden_text(text)
        data: list[tuple] = [(row, row.datum()) for row in rows]
    except (GoldenFormatError, TableDecodeError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    any_invalid = False
    for index, (row, datum) in enumerate(data, start=1):
        report = verify_realization(datum)
        square_ok = report.weyl_square is None or report.weyl_square <= 0
        valid = report.valid and square_ok
        print(f"block {index}: r = {format_rational(row.r)}: "
              f"{'valid' if valid else 'INVALID'}")
        for check in report.checks:
            if not check.passed:
                print(f"  FAIL {check.name}: {check.detail}")
        if report.weyl_square is not None:
            if report.weyl_square != row.r:
                print(
                    f"  note: recomputed Weyl square {format_rational(report.weyl_square)}"
                    f" differs from declared {format_rational(row.r)}"
                )
            if not square_ok:
                print(f"  FAIL weyl-square-positive: {report.weyl_square} > 0")
        if not valid:
            any_invalid = True
            continue
        flags = classify_flags(datum, report.weyl_square)
        sym = symmetry_group(datum)
        print(f"  type={flags.kind} compact={flags.compact} "
              f"untwisted={flags.untwisted} sym_order={sym.order}")
        for line in _matrix_lines("  cartan", cartan_matrix(datum).entries):
            print(line)
        for line in _matrix_lines("  symcartan", symmetrized_cartan(datum).entries):
            print(line)
    return EXIT_FAIL if any_invalid else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypercartan",
        description=(
            "Classify rank-3 hyperbolic generalized Cartan matrices of "
            "elliptic/parabolic type with a lattice Weyl vector, twisted "
            "to symmetric matrices."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    enum = sub.add_parser("enumerate", help="run the classification search")
    enum.add_argument("--lambda-max", type=int, default=6)
    enum.add_argument("--mode", choices=("elliptic", "parabolic"), default="elliptic")
    enum.add_argument("--r", default=None, help="only this Weyl square, e.g. -7/18")
    enum.add_argument("--max-sides", type=int, default=DEFAULT_MAX_SIDES)
    enum.add_argument("--format", choices=("table", "records"), default="table")
    enum.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    enum.add_argument("--untwisted-only", action="store_true")
    enum.add_argument("--noncompact-only", action="store_true")
    enum.set_defaults(func=cmd_enumerate)

    ver = sub.add_parser("verify", help="run the golden-data suite")
    ver.add_argument("--skip-engine", action="store_true",
                     help="static golden checks only (fast)")
    ver.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    ver.add_argument("--catalog", default=None,
                     help="alternative golden catalog file to verify against")
    ver.set_defaults(func=cmd_verify)

    chk = sub.add_parser("check", help="validate realization tables from a file")
    chk.add_argument("path")
    chk.set_defaults(func=cmd_check)

    return parser


_RATIONAL_TOKEN = re.compile(r"^-\d+(/\d+)?$")


def _merge_r_values(argv: list[str]) -> list[str]:
    """Let '--r -7/18' parse: argparse reads a bare '-7/18' as an option."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--r" and i + 1 < len(argv) and _RATIONAL_TOKEN.match(argv[i + 1]):
            out.append(f"--r={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    args = build_parser().parse_args(_merge_r_values(list(argv)))
    if getattr(args, "lambda_max", 1) < 1 or getattr(args, "max_sides", 3) < 3:
        print("error: --lambda-max must be >= 1 and --max-sides >= 3",
              file=sys.stderr)
        return EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
