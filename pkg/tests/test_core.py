from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypercartan.core import (
    GeometricRealizationTable,
    InvalidRealizationError,
    NotHyperbolicError,
    PolygonDatum,
    TableDecodeError,
    all_moves,
    apply_move,
    assemble_gram,
    cartan_matrix,
    classify_flags,
    divisibility_ok,
    polygon_table,
    reflect,
    symmetrized_cartan,
    symmetry_group,
    table_to_datum,
    verify_realization,
    weyl_vector,
)
from hypercartan.linalg import QMatrix


def triangle(p12, p13, p23, lam=(1, 1, 1)):
    return PolygonDatum(3, (p12, p13, p23), lam)


# Table rows used repeatedly below (lambda row, then cyclic pairing rows).
ROW_59_2 = GeometricRealizationTable(((1, 2, 2), (0, 1, 2)))
ROW_22 = GeometricRealizationTable(((2, 1, 1), (0, 1, 2)))
ROW_7_QUAD = GeometricRealizationTable(((1, 3, 3, 1), (0, 1, 0, 1), (3, 3, 3, 3)))
ROW_6 = GeometricRealizationTable(((1, 6, 3, 2), (0, 2, 0, 2), (3, 6, 3, 6)))


def test_assemble_gram_triangle():
    d = triangle(0, -1, -2)
    assert assemble_gram(d).to_rows() == [[2, 0, -1], [0, 2, -2], [-1, -2, 2]]


def test_assemble_gram_all_minus_two():
    d = triangle(-2, -2, -2)
    assert assemble_gram(d).to_rows() == [[2, -2, -2], [-2, 2, -2], [-2, -2, 2]]


def test_assemble_gram_orthogonal():
    d = triangle(0, 0, 0)
    assert assemble_gram(d).to_rows() == [[2, 0, 0], [0, 2, 0], [0, 0, 2]]


def test_weyl_vector_twisted_triangle():
    g = QMatrix.from_rows([[2, 0, -2], [0, 2, -1], [-2, -1, 2]])
    w = weyl_vector(g, (1, 2, 2))
    assert w.coords == (Fraction(15, 2), Fraction(3), Fraction(8))
    assert w.r == Fraction(-59, 2)


def test_weyl_vector_symmetric_triangle():
    g = QMatrix.from_rows([[2, -2, -2], [-2, 2, -2], [-2, -2, 2]])
    w = weyl_vector(g, (1, 1, 1))
    assert w.coords == (Fraction(1, 2), Fraction(1, 2), Fraction(1, 2))
    assert w.r == Fraction(-3, 2)


def test_weyl_vector_r_minus_22():
    g = QMatrix.from_rows([[2, 0, -2], [0, 2, -1], [-2, -1, 2]])
    assert weyl_vector(g, (2, 1, 1)).r == -22


def test_weyl_vector_rejects_definite_block():
    with pytest.raises(NotHyperbolicError):
        weyl_vector(QMatrix.identity(3), (1, 1, 1))


def test_weyl_vector_substitution_property():
    g = QMatrix.from_rows([[2, 0, -2], [0, 2, -1], [-2, -1, 2]])
    lam = (1, 2, 2)
    w = weyl_vector(g, lam)
    assert g.matvec(w.coords) == (-1, -2, -2)
    assert w.r == -sum(l * x for l, x in zip(lam, w.coords))


def test_divisibility_examples():
    assert divisibility_ok(2, 1, -2)
    assert not divisibility_ok(2, 1, -1)
    assert divisibility_ok(1, 7, -13)


def test_cartan_matrix_untwisted_equals_gram():
    d = triangle(0, -1, -2)
    a = cartan_matrix(d)
    assert [list(r) for r in a.entries] == assemble_gram(d).to_rows()
    assert a.symmetrizer == (1, 1, 1)


def test_cartan_matrix_a10():
    d = triangle(0, -1, -2)
    a10 = ((2, 0, -1), (0, 2, -2), (-1, -2, 2))
    assert cartan_matrix(d).entries == a10
    # the catalog row r=-23/2 carries the same matrix up to relabelling
    row = table_to_datum(GeometricRealizationTable(((1, 1, 1), (0, 1, 2))))
    images = {apply_move(row, m).pairings for m in all_moves(3)}
    assert d.pairings in images


def test_cartan_matrix_twisted_entries():
    d = table_to_datum(ROW_6)
    a = cartan_matrix(d).entries
    assert a[1][3] == -2  # lambda_4 * g_24 / lambda_2
    assert a[3][1] == -18
    assert a[0][2] == -9
    assert a[2][0] == -1


def test_cartan_matrix_divisibility_error():
    with pytest.raises(InvalidRealizationError):
        cartan_matrix(triangle(0, -1, -1, lam=(2, 1, 1)))


def test_symmetrized_cartan_untwisted():
    d = triangle(-1, -2, 0)
    assert [list(r) for r in symmetrized_cartan(d).entries] == assemble_gram(d).to_rows()


def test_symmetrized_cartan_twisted():
    d = table_to_datum(ROW_59_2)
    b = symmetrized_cartan(d).entries
    assert b[1][1] == 8
    assert b[1][2] == -4
    assert b[0][2] == -4


def test_symmetrized_is_scaled_gram():
    d = table_to_datum(ROW_6)
    b = symmetrized_cartan(d).entries
    for j in range(4):
        for k in range(4):
            assert b[j][k] == d.lam[j] * d.lam[k] * d.pair(j + 1, k + 1)


def test_reflect_negates_own_axis():
    g = QMatrix.from_rows([[2, 0, -2], [0, 2, -1], [-2, -1, 2]])
    assert reflect((0, 1, 0), 2, g) == (0, -1, 0)


def test_reflect_fixes_orthogonal_vector():
    g = QMatrix.from_rows([[2, 0, 0], [0, 2, -1], [0, -1, 2]])
    # (x, delta_1) = 0 for x = (0, 1, 1)
    assert reflect((0, 1, 1), 1, g) == (0, 1, 1)


def test_reflect_parallel_sides():
    g = QMatrix.from_rows([[2, -2, 0], [-2, 2, -1], [0, -1, 2]])
    assert reflect((0, 1, 0), 1, g) == (2, 1, 0)


@given(
    st.tuples(*(st.integers(min_value=-5, max_value=5) for _ in range(3))),
    st.integers(min_value=1, max_value=3),
)
def test_reflect_is_an_isometric_involution(x, i):
    g = QMatrix.from_rows([[2, 0, -2], [0, 2, -1], [-2, -1, 2]])

    def form(u, v):
        return sum(
            Fraction(u[a]) * g.entry(a, b) * Fraction(v[b])
            for a in range(3)
            for b in range(3)
        )

    image = reflect(x, i, g)
    assert reflect(image, i, g) == tuple(Fraction(v) for v in x)
    assert form(image, image) == form(x, x)


def test_polygon_table_triangle():
    d = table_to_datum(GeometricRealizationTable(((1, 1, 1), (0, 1, 2))))
    assert polygon_table(d).rows == ((1, 1, 1), (0, 1, 2))


def test_polygon_table_quadrangle():
    d = table_to_datum(ROW_7_QUAD)
    assert polygon_table(d).rows == ROW_7_QUAD.rows
    # the even-n middle row lists each antipodal pairing twice
    assert d.pair(1, 3) == -3 and d.pair(2, 4) == -3


def test_table_decode_errors():
    with pytest.raises(TableDecodeError):
        table_to_datum(GeometricRealizationTable(((1, 1, 1),)))
    with pytest.raises(TableDecodeError):
        table_to_datum(GeometricRealizationTable(((1, 1, 1), (0, -1, 2))))
    with pytest.raises(TableDecodeError):
        table_to_datum(
            GeometricRealizationTable(((1, 1, 1, 1), (0, 1, 0, 1), (3, 3, 4, 3)))
        )
    with pytest.raises(TableDecodeError):
        table_to_datum(GeometricRealizationTable(((1, 1, 1, 1), (0, 1, 0, 1))))


def test_verify_accepts_catalog_row():
    report = verify_realization(table_to_datum(ROW_22))
    assert report.valid
    assert report.weyl_square == -22


def test_verify_rejects_tampered_lambda():
    tampered = PolygonDatum(3, table_to_datum(ROW_22).pairings, (2, 1, 2))
    report = verify_realization(tampered)
    assert not report.valid
    failed = {c.name for c in report.failures()}
    assert "divisibility" in failed


def test_verify_rejects_sharp_adjacent_pairing():
    report = verify_realization(triangle(-3, -1, -2))
    assert not report.valid
    assert "adjacent-pairings" in {c.name for c in report.failures()}


def test_verify_rejects_noncoprime_lambda():
    d = PolygonDatum(3, table_to_datum(ROW_59_2).pairings, (2, 4, 4))
    assert "coprime-lambda" in {c.name for c in verify_realization(d).failures()}


def test_verify_reports_all_failures():
    d = PolygonDatum(3, (-3, -1, -1), (2, 4, 4))
    failed = {c.name for c in verify_realization(d).failures()}
    assert {"adjacent-pairings", "coprime-lambda", "divisibility"} <= failed


def test_verify_rank_failure_on_independent_sides():
    d = PolygonDatum(4, (0,) * 6, (1, 1, 1, 1))
    failed = {c.name for c in verify_realization(d).failures()}
    assert "rank" in failed
    assert "lorentzian" in failed


def test_verify_lorentzian_failure_on_definite_triangle():
    report = verify_realization(triangle(0, 0, -1))
    failed = {c.name for c in report.failures()}
    assert failed == {"lorentzian"}
    assert report.weyl_square is not None and report.weyl_square > 0


def test_classify_flags_examples():
    d = table_to_datum(GeometricRealizationTable(((1, 1, 1), (0, 1, 2))))
    w = verify_realization(d).weyl_square
    flags = classify_flags(d, w)
    assert (flags.kind, flags.compact, flags.untwisted) == ("elliptic", False, True)

    quad = table_to_datum(ROW_7_QUAD)
    flags = classify_flags(quad, verify_realization(quad).weyl_square)
    assert (flags.kind, flags.compact, flags.untwisted) == ("elliptic", True, False)

    square = table_to_datum(
        GeometricRealizationTable(((1, 1, 1, 1), (1, 1, 1, 1), (4, 4, 4, 4)))
    )
    flags = classify_flags(square, verify_realization(square).weyl_square)
    assert (flags.kind, flags.compact, flags.untwisted) == ("elliptic", True, True)


def test_classify_flags_rejects_positive_square():
    with pytest.raises(ValueError):
        classify_flags(triangle(0, 0, 0), Fraction(1))


@given(st.integers(min_value=0, max_value=23))
def test_classify_flags_dihedral_invariant(index):
    d = table_to_datum(ROW_6)
    moves = all_moves(d.n)
    image = apply_move(d, moves[index % len(moves)])
    w = verify_realization(d).weyl_square
    assert classify_flags(image, w) == classify_flags(d, w)


def test_symmetry_group_full_triangle():
    sym = symmetry_group(triangle(-2, -2, -2))
    assert (sym.order, sym.kind, sym.degree) == (6, "dihedral", 3)


def test_symmetry_group_trivial():
    sym = symmetry_group(table_to_datum(GeometricRealizationTable(((1, 1, 1), (0, 1, 2)))))
    assert (sym.order, sym.kind) == (1, "trivial")


def test_symmetry_group_right_quadrangle():
    d = PolygonDatum(4, (-2, -6, -2, -2, -6, -2), (1, 1, 1, 1))
    sym = symmetry_group(d)
    assert (sym.order, sym.kind, sym.degree) == (8, "dihedral", 4)


def test_symmetry_generators_fix_datum():
    d = table_to_datum(ROW_7_QUAD)
    sym = symmetry_group(d)
    # only the reflection swapping sides (1,4) and (2,3) preserves the lambdas
    assert (sym.order, sym.kind, sym.degree) == (2, "dihedral", 1)
    for gen in sym.generators:
        assert apply_move(d, gen) == d


def test_symmetry_order_divides_2n():
    for d in (
        triangle(-2, -2, -2),
        table_to_datum(ROW_7_QUAD),
        table_to_datum(ROW_6),
    ):
        assert (2 * d.n) % symmetry_group(d).order == 0
