"""Embedded golden data and the checks tying it to the search engine.

Two data files ship with the package: the full 60-entry catalog of
realization tables (``data/catalog.txt``, in the same plain-text block
format the CLI reads and writes) and the twelve explicit lattice
realizations of the symmetric non-compact solutions
(``data/fixtures.json``), each with its root coordinates, Weyl vector,
symmetry order and expected Cartan matrix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .canonical import PackedDatum, canonical_form
from .core import (
    CheckResult,
    GeometricRealizationTable,
    PolygonDatum,
    Rational,
    symmetry_group,
    table_to_datum,
    verify_realization,
)
from .engine import CatalogRecord
from .linalg import QMatrix, det, solve


class GoldenFormatError(ValueError):
    """A golden-format text block that cannot be parsed."""


@dataclass(frozen=True)
class GoldenRow:
    r: Rational
    table: GeometricRealizationTable

    def datum(self) -> PolygonDatum:
        return table_to_datum(self.table)


@dataclass(frozen=True)
class NamedCartan:
    """One of the twelve symmetric non-compact matrices, with its radius."""

    name: str
    r: Rational
    entries: tuple[tuple[int, ...], ...]

    def datum(self) -> PolygonDatum:
        n = len(self.entries)
        pairings = tuple(
            self.entries[i][j] for i in range(n) for j in range(i + 1, n)
        )
        return PolygonDatum(n, pairings, (1,) * n)


@dataclass(frozen=True)
class LatticeFixture:
    """An explicit realization: lattice basis, root and Weyl coordinates.

    ``basis`` rows and ``roots`` are coordinates in the ambient family
    lattice whose Gram matrix is ``family_gram``; the named lattice is
    the span of the basis rows, and the roots must lie in it.
    """

    name: str
    family_gram: tuple[tuple[int, ...], ...]
    basis: tuple[tuple[int, ...], ...]
    roots: tuple[tuple[int, ...], ...]
    rho: tuple[Rational, Rational, Rational]
    expected_r: Rational
    expected_sym_order: int
    lattice: str
    expected_det: int
    expected_cartan: tuple[tuple[int, ...], ...]

    def basis_gram(self) -> QMatrix:
        g = self.family_gram
        rows = []
        for u in self.basis:
            rows.append(
                [
                    sum(
                        u[i] * g[i][j] * v[j]
                        for i in range(3)
                        for j in range(3)
                    )
                    for v in self.basis
                ]
            )
        return QMatrix.from_rows(rows)

    def pairing(self, u, v) -> Fraction:
        g = self.family_gram
        return Fraction(
            sum(u[i] * g[i][j] * v[j] for i in range(3) for j in range(3))
        )

    def induced_polygon(self) -> PolygonDatum:
        n = len(self.roots)
        pairings = tuple(
            int(self.pairing(self.roots[i], self.roots[j]))
            for i in range(n)
            for j in range(i + 1, n)
        )
        return PolygonDatum(n, pairings, (1,) * n)


@dataclass(frozen=True)
class FixtureReport:
    name: str
    checks: tuple[CheckResult, ...]

    @property
    def valid(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if not c.passed)


@dataclass(frozen=True)
class CrossCheckReport:
    engine_count: int
    golden_count: int
    missing: tuple[tuple[int, tuple[int, ...]], ...]
    extra: tuple[tuple[int, tuple[int, ...]], ...]
    mismatched: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not (self.missing or self.extra or self.mismatched)


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise GoldenFormatError(f"bad rational {text!r}") from exc


def format_rational(x: Rational) -> str:
    return str(Fraction(x))


def parse_golden_text(text: str) -> list[GoldenRow]:
    """Parse golden-format blocks: 'r = p/q' then the table rows.

    Blank lines separate blocks; lines starting with '#' are comments.
    """
    rows: list[GoldenRow] = []
    block: list[str] = []
    for raw in text.splitlines() + [""]:
        line = raw.strip()
        if line.startswith("#"):
            continue
        if line:
            block.append(line)
            continue
        if not block:
            continue
        head = block[0]
        if "=" not in head or not head.split("=")[0].strip() == "r":
            raise GoldenFormatError(f"block must start with 'r = ...', got {head!r}")
        r = parse_rational(head.split("=", 1)[1])
        try:
            table_rows = tuple(
                tuple(int(tok) for tok in line.split()) for line in block[1:]
            )
        except ValueError as exc:
            raise GoldenFormatError(f"non-integer table entry in block r={r}") from exc
        if not table_rows:
            raise GoldenFormatError(f"block r={r} has no table rows")
        rows.append(GoldenRow(r, GeometricRealizationTable(table_rows)))
        block = []
    if not rows:
        raise GoldenFormatError("no blocks found")
    return rows


def format_golden_block(r: Rational, table: GeometricRealizationTable) -> str:
    lines = [f"r = {format_rational(r)}"]
    lines.extend(" ".join(str(v) for v in row) for row in table.rows)
    return "\n".join(lines)


def _data_text(name: str) -> str:
    return resources.files("hypercartan.data").joinpath(name).read_text()


@lru_cache(maxsize=None)
def golden_catalog() -> tuple[GoldenRow, ...]:
    """The embedded 60-entry catalog, in ascending order of r."""
    return tuple(parse_golden_text(_data_text("catalog.txt")))


@lru_cache(maxsize=None)
def _fixture_data() -> tuple[LatticeFixture, ...]:
    payload = json.loads(_data_text("fixtures.json"))
    out = []
    for fx in payload["fixtures"]:
        out.append(
            LatticeFixture(
                name=fx["name"],
                family_gram=tuple(tuple(row) for row in fx["family_gram"]),
                basis=tuple(tuple(row) for row in fx["basis"]),
                roots=tuple(tuple(row) for row in fx["roots"]),
                rho=tuple(parse_rational(x) for x in fx["rho"]),
                expected_r=parse_rational(fx["r"]),
                expected_sym_order=fx["sym_order"],
                lattice=fx["lattice"],
                expected_det=fx["lattice_det"],
                expected_cartan=tuple(tuple(row) for row in fx["cartan"]),
            )
        )
    return tuple(out)


def lattice_fixtures() -> tuple[LatticeFixture, ...]:
    return _fixture_data()


def symmetric_noncompact_matrices() -> tuple[NamedCartan, ...]:
    """The twelve symmetric non-compact matrices with their r values."""
    return tuple(
        NamedCartan(f.name, f.expected_r, f.expected_cartan)
        for f in _fixture_data()
    )


def canonical_key(d: PolygonDatum) -> tuple[int, tuple[int, ...]]:
    c = canonical_form(PackedDatum.from_polygon(d))
    return (c.n, c.body)


def verify_fixture(f: LatticeFixture) -> FixtureReport:
    """Re-derive everything a fixture claims and compare.

    Checks: the sublattice determinant, that the roots lie in the
    sublattice, root norms, the Gram matrix against the expected Cartan
    matrix, the Weyl pairings (rho, delta_i) = -1, the Weyl square, and
    the symmetry order of the induced polygon.
    """
    checks: list[CheckResult] = []
    n = len(f.roots)

    bg = f.basis_gram()
    d = det(bg)
    checks.append(
        CheckResult(
            "lattice-determinant",
            d == f.expected_det,
            f"det {d}, expected {f.expected_det} ({f.lattice})",
        )
    )

    basis_t = QMatrix.from_rows(
        [[f.basis[j][i] for j in range(3)] for i in range(3)]
    )
    non_integral = []
    for idx, root in enumerate(f.roots, start=1):
        coords = solve(basis_t, root)
        if any(x.denominator != 1 for x in coords):
            non_integral.append((idx, coords))
    checks.append(
        CheckResult(
            "roots-in-lattice",
            not non_integral,
            f"roots outside the sublattice: {non_integral}" if non_integral else "",
        )
    )

    bad_norm = [
        (i + 1, f.pairing(root, root))
        for i, root in enumerate(f.roots)
        if f.pairing(root, root) != 2
    ]
    checks.append(
        CheckResult(
            "root-norms", not bad_norm, f"squares != 2: {bad_norm}" if bad_norm else ""
        )
    )

    gram_mismatch = [
        (i + 1, j + 1)
        for i in range(n)
        for j in range(n)
        if f.pairing(f.roots[i], f.roots[j]) != f.expected_cartan[i][j]
    ]
    checks.append(
        CheckResult(
            "gram-matches-cartan",
            not gram_mismatch,
            f"pairs off: {gram_mismatch}" if gram_mismatch else "",
        )
    )

    bad_weyl = [
        (i + 1, f.pairing(f.rho, root))
        for i, root in enumerate(f.roots)
        if f.pairing(f.rho, root) != -1
    ]
    checks.append(
        CheckResult(
            "weyl-pairings",
            not bad_weyl,
            f"(rho, delta_i) != -1 at {bad_weyl}" if bad_weyl else "",
        )
    )

    rr = f.pairing(f.rho, f.rho)
    checks.append(
        CheckResult(
            "weyl-square", rr == f.expected_r, f"(rho, rho) = {rr}, expected {f.expected_r}"
        )
    )

    sym = symmetry_group(f.induced_polygon())
    checks.append(
        CheckResult(
            "symmetry-order",
            sym.order == f.expected_sym_order,
            f"order {sym.order}, expected {f.expected_sym_order}",
        )
    )

    return FixtureReport(f.name, tuple(checks))


def self_check_catalog(
    rows: tuple[GoldenRow, ...] | None = None,
) -> list[CheckResult]:
    """The golden catalog's own consistency: decode, verify, recount."""
    checks: list[CheckResult] = []
    if rows is None:
        rows = golden_catalog()
    checks.append(
        CheckResult("catalog-size", len(rows) == 60, f"{len(rows)} rows, expected 60")
    )
    bad: list[str] = []
    untwisted = 0
    compact = 0
    for idx, row in enumerate(rows, start=1):
        try:
            d = row.datum()
        except Exception as exc:  # decode failure is a data bug
            bad.append(f"row {idx} (r={row.r}): {exc}")
            continue
        report = verify_realization(d)
        if not report.valid:
            bad.append(f"row {idx} (r={row.r}): {report.failures()}")
        elif report.weyl_square != row.r:
            bad.append(
                f"row {idx}: recomputed square {report.weyl_square} != {row.r}"
            )
        if all(l == 1 for l in d.lam):
            untwisted += 1
        if all(p != -2 for p in d.adjacent_pairs()):
            compact += 1
    checks.append(
        CheckResult("rows-valid", not bad, "; ".join(bad) if bad else "")
    )
    checks.append(
        CheckResult("untwisted-count", untwisted == 16, f"{untwisted}, expected 16")
    )
    checks.append(
        CheckResult("compact-count", compact == 7, f"{compact}, expected 7")
    )
    return checks


def cross_check(
    records: tuple[CatalogRecord, ...] | list[CatalogRecord],
    golden_rows: tuple[GoldenRow, ...] | None = None,
) -> CrossCheckReport:
    """Compare an engine catalog against the golden data.

    Canonical forms must biject with the golden catalog, and the
    twelve untwisted non-compact records must realize the named
    symmetric matrices at their stated radii.
    """
    if golden_rows is None:
        golden_rows = golden_catalog()
    engine_keys = {(rec.n, rec.body): rec for rec in records}
    golden_keys: dict[tuple[int, tuple[int, ...]], GoldenRow] = {}
    for row in golden_rows:
        golden_keys[canonical_key(row.datum())] = row

    missing = tuple(sorted(k for k in golden_keys if k not in engine_keys))
    extra = tuple(sorted(k for k in engine_keys if k not in golden_keys))

    mismatched: list[str] = []
    for key, row in golden_keys.items():
        rec = engine_keys.get(key)
        if rec is not None and rec.r != row.r:
            mismatched.append(
                f"radius disagrees at {key}: engine {rec.r}, golden {row.r}"
            )

    for named in symmetric_noncompact_matrices():
        matches = [
            rec
            for rec in records
            if rec.r == named.r and rec.untwisted and not rec.compact
        ]
        if len(matches) != 1:
            mismatched.append(
                f"{named.name}: expected a unique untwisted non-compact record "
                f"at r={named.r}, found {len(matches)}"
            )
            continue
        if (matches[0].n, matches[0].body) != canonical_key(named.datum()):
            mismatched.append(
                f"{named.name}: record at r={named.r} does not realize the matrix"
            )

    return CrossCheckReport(
        engine_count=len(engine_keys),
        golden_count=len(golden_keys),
        missing=missing,
        extra=extra,
        mismatched=tuple(sorted(mismatched)),
    )
