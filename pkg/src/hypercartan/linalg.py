"""Exact rational linear algebra for small dense matrices.

Scalars are arbitrary-precision rationals (``fractions.Fraction``), so
nothing here ever rounds.  Determinant and rank run fraction-free
(Bareiss) on an integer rescaling of the rows, which keeps intermediate
entries polynomially bounded; linear solve is plain Gaussian elimination
over the rationals.  Singularity means det == 0 exactly, never "small".
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

Rational = Fraction

QLike = Rational | int


class ShapeError(ValueError):
    """Matrix/vector dimensions do not fit the requested operation."""


class SingularMatrixError(ZeroDivisionError):
    """A linear solve hit an exactly singular matrix."""


def _as_rational(x: QLike) -> Rational:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class QMatrix:
    """Immutable rows x cols matrix of rationals, row-major."""

    rows: int
    cols: int
    entries: tuple[Rational, ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ShapeError("negative dimensions")
        if len(self.entries) != self.rows * self.cols:
            raise ShapeError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[QLike]]) -> "QMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        flat: list[Rational] = []
        for row in rows:
            if len(row) != ncols:
                raise ShapeError("ragged rows")
            flat.extend(_as_rational(x) for x in row)
        return cls(nrows, ncols, tuple(flat))

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls.from_rows(
            [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        )

    def entry(self, i: int, j: int) -> Rational:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Rational, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def to_rows(self) -> list[list[Rational]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "QMatrix":
        return QMatrix.from_rows(
            [[self.entry(i, j) for i in range(self.rows)] for j in range(self.cols)]
        )

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def matvec(self, v: Sequence[QLike]) -> tuple[Rational, ...]:
        if len(v) != self.cols:
            raise ShapeError("vector length does not match column count")
        vv = [_as_rational(x) for x in v]
        return tuple(
            sum((self.entry(i, j) * vv[j] for j in range(self.cols)), Fraction(0))
            for i in range(self.rows)
        )


def _integer_rows(m: QMatrix) -> tuple[list[list[int]], Rational]:
    """Rescale each row to integers; return (rows, product of row scales)."""
    rows: list[list[int]] = []
    scale = Fraction(1)
    for i in range(m.rows):
        row = m.row(i)
        mult = lcm(*(x.denominator for x in row)) if row else 1
        scale *= mult
        rows.append([int(x * mult) for x in row])
    return rows, scale


def _bareiss_det(a: list[list[int]]) -> int:
    """Fraction-free determinant of an integer matrix (destroys its input)."""
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            arow = a[i]
            krow = a[k]
            for j in range(k + 1, n):
                arow[j] = (arow[j] * pivot - aik * krow[j]) // prev
            arow[k] = 0
        prev = pivot
    return sign * a[n - 1][n - 1]


def det(m: QMatrix) -> Rational:
    """Exact determinant of a square matrix."""
    if not m.is_square:
        raise ShapeError("determinant of a non-square matrix")
    rows, scale = _integer_rows(m)
    return Fraction(_bareiss_det(rows)) / scale


def rank(m: QMatrix) -> int:
    """Rank over the rationals, via fraction-free elimination."""
    rows, _ = _integer_rows(m)
    nrows, ncols = m.rows, m.cols
    r = 0
    prev = 1
    for c in range(ncols):
        pivot_row = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        pivot = rows[r][c]
        for i in range(r + 1, nrows):
            aic = rows[i][c]
            for j in range(c + 1, ncols):
                rows[i][j] = (rows[i][j] * pivot - aic * rows[r][j]) // prev
            rows[i][c] = 0
        prev = pivot
        r += 1
        if r == nrows:
            break
    return r


def solve(m: QMatrix, v: Sequence[QLike]) -> tuple[Rational, ...]:
    """Solve m x = v exactly; raises SingularMatrixError when det(m) == 0."""
    if not m.is_square:
        raise ShapeError("solve needs a square matrix")
    n = m.rows
    if len(v) != n:
        raise ShapeError("right-hand side length does not match matrix size")
    a = [list(m.row(i)) + [_as_rational(v[i])] for i in range(n)]
    for k in range(n):
        pivot_row = next((i for i in range(k, n) if a[i][k] != 0), None)
        if pivot_row is None:
            raise SingularMatrixError("matrix is singular")
        a[k], a[pivot_row] = a[pivot_row], a[k]
        pivot = a[k][k]
        for i in range(k + 1, n):
            factor = a[i][k] / pivot
            if factor:
                for j in range(k, n + 1):
                    a[i][j] -= factor * a[k][j]
    x = [Fraction(0)] * n
    for k in range(n - 1, -1, -1):
        acc = a[k][n] - sum((a[k][j] * x[j] for j in range(k + 1, n)), Fraction(0))
        x[k] = acc / a[k][k]
    return tuple(x)


def solve_consistent(
    m: QMatrix, v: Sequence[QLike]
) -> tuple[Rational, ...] | None:
    """One exact solution of m x = v for a possibly singular m, or None.

    Used for rank-deficient Gram systems: any solution works for the
    callers here because they only evaluate quantities constant on the
    solution set.
    """
    nrows, ncols = m.rows, m.cols
    if len(v) != nrows:
        raise ShapeError("right-hand side length does not match row count")
    a = [list(m.row(i)) + [_as_rational(v[i])] for i in range(nrows)]
    pivots: list[tuple[int, int]] = []
    r = 0
    for c in range(ncols):
        pivot_row = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if pivot_row is None:
            continue
        a[r], a[pivot_row] = a[pivot_row], a[r]
        pivot = a[r][c]
        for i in range(r + 1, nrows):
            factor = a[i][c] / pivot
            if factor:
                for j in range(c, ncols + 1):
                    a[i][j] -= factor * a[r][j]
        pivots.append((r, c))
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if a[i][ncols] != 0:
            return None
    x = [Fraction(0)] * ncols
    for pr, pc in reversed(pivots):
        acc = a[pr][ncols] - sum(
            (a[pr][j] * x[j] for j in range(pc + 1, ncols)), Fraction(0)
        )
        x[pc] = acc / a[pr][pc]
    return tuple(x)


def det_int_rows(rows: Iterable[Iterable[int]]) -> int:
    """Determinant of a square integer matrix given as nested iterables."""
    a = [list(r) for r in rows]
    if any(len(r) != len(a) for r in a):
        raise ShapeError("determinant of a non-square matrix")
    return _bareiss_det(a)
