from collections import Counter
from fractions import Fraction

import pytest

from hypercartan.core import polygon_table, verify_realization
from hypercartan.engine import run_elliptic
from hypercartan.goldens import (
    GoldenFormatError,
    GoldenRow,
    canonical_key,
    cross_check,
    format_golden_block,
    lattice_fixtures,
    parse_golden_text,
    self_check_catalog,
    golden_catalog,
    symmetric_noncompact_matrices,
    verify_fixture,
)

EXPECTED_RADIUS_COUNTS = {
    Fraction(-59, 2): 1,
    Fraction(-22): 1,
    Fraction(-16): 1,
    Fraction(-23, 2): 1,
    Fraction(-10): 1,
    Fraction(-17, 2): 1,
    Fraction(-7): 2,
    Fraction(-6): 1,
    Fraction(-11, 2): 2,
    Fraction(-4): 5,
    Fraction(-7, 2): 1,
    Fraction(-5, 2): 1,
    Fraction(-13, 6): 1,
    Fraction(-17, 8): 1,
    Fraction(-2): 4,
    Fraction(-3, 2): 2,
    Fraction(-1): 6,
    Fraction(-2, 3): 1,
    Fraction(-5, 8): 1,
    Fraction(-1, 2): 6,
    Fraction(-2, 5): 1,
    Fraction(-7, 18): 1,
    Fraction(-1, 4): 2,
    Fraction(-2, 9): 1,
    Fraction(-1, 6): 13,
    Fraction(-1, 8): 1,
    Fraction(-1, 24): 1,
}

EXPECTED_SYM_ORDERS = {
    "1,0": 1, "1,I": 2, "1,II": 6, "1,III": 2,
    "2,0": 2, "2,I": 4, "2,II": 8, "2,III": 8,
    "3,0": 2, "3,I": 4, "3,II": 12, "3,III": 12,
}


def test_catalog_has_sixty_rows():
    rows = golden_catalog()
    assert len(rows) == 60
    assert rows[0].r == Fraction(-59, 2)
    assert rows[0].table.rows == ((1, 2, 2), (0, 1, 2))
    last = rows[-1]
    assert last.r == Fraction(-1, 24)
    assert last.datum().n == 12
    assert last.datum().lam == (1,) * 12


def test_catalog_radius_distribution():
    counts = Counter(row.r for row in golden_catalog())
    assert dict(counts) == EXPECTED_RADIUS_COUNTS


def test_catalog_self_check_passes():
    for check in self_check_catalog():
        assert check.passed, (check.name, check.detail)


def test_catalog_rows_round_trip_through_tables():
    for row in golden_catalog():
        d = row.datum()
        assert polygon_table(d).rows == row.table.rows


def test_self_check_detects_corruption():
    rows = list(golden_catalog())
    bad_table = tuple(
        tuple(v + (1 if (i, j) == (1, 0) else 0) for j, v in enumerate(r))
        for i, r in enumerate(rows[0].table.rows)
    )
    rows[0] = GoldenRow(rows[0].r, type(rows[0].table)(bad_table))
    checks = {c.name: c for c in self_check_catalog(tuple(rows))}
    assert not checks["rows-valid"].passed


def test_symmetric_noncompact_matrices_shape():
    named = symmetric_noncompact_matrices()
    assert len(named) == 12
    by_name = {m.name: m for m in named}
    assert by_name["1,0"].entries == ((2, 0, -1), (0, 2, -2), (-1, -2, 2))
    assert by_name["3,III"].entries[0] == (
        2, -2, -11, -25, -37, -47, -50, -46, -37, -23, -11, -1,
    )
    for m in named:
        n = len(m.entries)
        for i in range(n):
            assert m.entries[i][i] == 2
            for j in range(n):
                assert m.entries[i][j] == m.entries[j][i]


def test_symmetric_noncompact_radius_association():
    assert {m.name: m.r for m in symmetric_noncompact_matrices()} == {
        "1,0": Fraction(-23, 2), "1,I": Fraction(-4), "1,II": Fraction(-3, 2),
        "1,III": Fraction(-7, 18), "2,0": Fraction(-7, 2), "2,I": Fraction(-1),
        "2,II": Fraction(-1, 2), "2,III": Fraction(-1, 8),
        "3,0": Fraction(-13, 6), "3,I": Fraction(-2, 3),
        "3,II": Fraction(-1, 6), "3,III": Fraction(-1, 24),
    }


def test_all_fixtures_verify():
    for fixture in lattice_fixtures():
        report = verify_fixture(fixture)
        assert report.valid, (fixture.name, report.failures())


def test_fixture_sym_orders():
    for fixture in lattice_fixtures():
        assert fixture.expected_sym_order == EXPECTED_SYM_ORDERS[fixture.name]


def test_fixture_polygons_match_catalog_rows():
    rows_by_key = {canonical_key(row.datum()): row for row in golden_catalog()}
    for fixture in lattice_fixtures():
        key = canonical_key(fixture.induced_polygon())
        assert key in rows_by_key
        assert rows_by_key[key].r == fixture.expected_r


def test_fixture_verification_detects_wrong_root():
    from dataclasses import replace

    fixture = lattice_fixtures()[0]
    broken = replace(fixture, roots=((2, 0, 0),) + fixture.roots[1:])
    report = verify_fixture(broken)
    assert not report.valid


def test_golden_text_parser_round_trip():
    rows = golden_catalog()
    text = "\n\n".join(format_golden_block(r.r, r.table) for r in rows)
    assert [(p.r, p.table.rows) for p in parse_golden_text(text)] == [
        (p.r, p.table.rows) for p in rows
    ]


def test_golden_text_parser_errors():
    with pytest.raises(GoldenFormatError):
        parse_golden_text("")
    with pytest.raises(GoldenFormatError):
        parse_golden_text("x = 3\n1 1 1\n")
    with pytest.raises(GoldenFormatError):
        parse_golden_text("r = -2\n1 a 1\n")
    with pytest.raises(GoldenFormatError):
        parse_golden_text("r = -2\n")


@pytest.fixture(scope="module")
def catalog2():
    return run_elliptic(2)


def test_cross_check_flags_missing_and_extra(catalog2):
    records = list(catalog2.records)
    golden_subset = tuple(
        row for row in golden_catalog() if max(row.datum().lam) <= 2
    )
    report = cross_check(records, golden_subset)
    assert report.ok, (report.missing, report.extra, report.mismatched)

    dropped = cross_check(records[1:], golden_subset)
    assert len(dropped.missing) == 1 and not dropped.extra

    foreign = [r for r in run_elliptic(3).records if max(r.lam) == 3][:1]
    extra = cross_check(records + foreign, golden_subset)
    assert len(extra.extra) == 1 and not extra.missing


def test_cross_check_lambda2_against_subset_catches_symmetric_noncompact_matrices(catalog2):
    report = cross_check(list(catalog2.records))
    # the full golden catalog has rows the lambda<=2 run cannot reach
    assert report.missing and not report.extra


def test_verify_realization_on_every_row_matches_stored_r():
    for row in golden_catalog():
        report = verify_realization(row.datum())
        assert report.valid
        assert report.weyl_square == row.r


def test_catalog_cartan_matrices_are_generalized_cartan():
    from hypercartan.core import cartan_matrix, symmetrized_cartan

    for row in golden_catalog():
        d = row.datum()
        a = cartan_matrix(d).entries
        b = symmetrized_cartan(d).entries
        n = d.n
        for i in range(n):
            assert a[i][i] == 2
            assert b[i][i] == 2 * d.lam[i] ** 2
            for j in range(n):
                if i != j:
                    assert a[i][j] <= 0
                    assert (a[i][j] == 0) == (a[j][i] == 0)
                    assert (2 * b[i][j]) % b[i][i] == 0  # even-symmetrizable
                assert b[i][j] == b[j][i]
                assert b[i][j] == d.lam[i] * d.lam[j] * d.pair(i + 1, j + 1)


def test_catalog_symmetry_generators_fix_each_row():
    from hypercartan.core import apply_move, symmetry_group

    for row in golden_catalog():
        d = row.datum()
        sym = symmetry_group(d)
        assert (2 * d.n) % sym.order == 0
        for gen in sym.generators:
            assert apply_move(d, gen) == d
