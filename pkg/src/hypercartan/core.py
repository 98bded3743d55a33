"""Domain model for geometric realizations of rank-3 hyperbolic GCMs.

The objects here describe a labelled polygon on the hyperbolic plane
through pure combinatorial data: the pairwise products of its norm-2
side vectors and the positive twisting coefficients attached to them.
Everything is an immutable value; all arithmetic is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Protocol, Sequence

from .linalg import (
    QMatrix,
    Rational,
    det,
    det_int_rows,
    rank,
    solve,
    solve_consistent,
)


class NotHyperbolicError(ValueError):
    """A 3x3 Gram block that must be Lorentzian is not (det >= 0)."""


class InvalidRealizationError(ValueError):
    """Polygon data violating a structural requirement of a realization."""


class TableDecodeError(ValueError):
    """A realization table that cannot be decoded into polygon data."""


def pack_index(n: int, i: int, j: int) -> int:
    """0-based position of the unordered pair (i, j), 1 <= i < j <= n.

    Pairs are stored row-major over the strict upper triangle:
    (1,2), (1,3), ..., (1,n), (2,3), ...
    """
    if not 1 <= i < j <= n:
        raise IndexError(f"bad pair ({i}, {j}) for n={n}")
    return (i - 1) * (2 * n - i) // 2 + (j - i) - 1


def pair_count(n: int) -> int:
    return n * (n - 1) // 2


class SidesDatum(Protocol):
    """Anything carrying n labelled sides with pairings and lambdas."""

    @property
    def size(self) -> int: ...

    def pair(self, i: int, j: int) -> int: ...

    @property
    def lam(self) -> tuple[int, ...]: ...


@dataclass(frozen=True)
class PolygonDatum:
    """Closed n-gon data: side pairings (delta_i, delta_j) and lambdas.

    ``pairings`` holds the strict upper triangle in packed order; every
    diagonal value (delta_i, delta_i) is 2 by convention and not stored.
    """

    n: int
    pairings: tuple[int, ...]
    lam: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 3:
            raise InvalidRealizationError("a polygon needs at least 3 sides")
        if len(self.pairings) != pair_count(self.n):
            raise InvalidRealizationError("wrong number of pairings")
        if len(self.lam) != self.n:
            raise InvalidRealizationError("wrong number of lambdas")
        if any(l < 1 for l in self.lam):
            raise InvalidRealizationError("lambdas must be positive")

    @property
    def size(self) -> int:
        return self.n

    def pair(self, i: int, j: int) -> int:
        if i == j:
            return 2
        if i > j:
            i, j = j, i
        return self.pairings[pack_index(self.n, i, j)]

    def adjacent_pairs(self) -> tuple[int, ...]:
        """Cyclic-adjacent pairings (delta_1,delta_2), ..., (delta_n,delta_1)."""
        n = self.n
        return tuple(self.pair(i, i % n + 1) for i in range(1, n + 1))


@dataclass(frozen=True)
class WeylData:
    """A Weyl vector rho in the basis of the first three sides, and r = (rho, rho)."""

    coords: tuple[Rational, Rational, Rational]
    r: Rational


@dataclass(frozen=True)
class CartanMatrix:
    """Generalized Cartan matrix A with its diagonal symmetrizer 1/lambda_i^2."""

    entries: tuple[tuple[int, ...], ...]
    symmetrizer: tuple[Rational, ...]


@dataclass(frozen=True)
class SymmetrizedCartan:
    """Symmetric even matrix B with b_ij = lambda_i lambda_j (delta_i, delta_j)."""

    entries: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class GeometricRealizationTable:
    """The (1 + n//2) x n tabular encoding: lambda row, then cyclic pairing rows."""

    rows: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.rows[0])


@dataclass(frozen=True)
class DihedralMove:
    """Side relabelling i -> sigma(i): rotate by ``shift``, mirror first if ``reflected``."""

    shift: int
    reflected: bool

    def source_index(self, n: int, i: int) -> int:
        """Old label of the side that becomes side i (1-based)."""
        if self.reflected:
            return (n - i + self.shift) % n + 1
        return (i - 1 + self.shift) % n + 1


@dataclass(frozen=True)
class SymmetryGroup:
    order: int
    kind: str  # "trivial" | "cyclic" | "dihedral"
    degree: int  # cyclic(k) has order k, dihedral(k) has order 2k
    generators: tuple[DihedralMove, ...]


@dataclass(frozen=True)
class RealizationFlags:
    kind: str  # "elliptic" | "parabolic"
    compact: bool
    untwisted: bool


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class RealizationReport:
    datum: PolygonDatum
    checks: tuple[CheckResult, ...]
    weyl_solution: tuple[Rational, ...] | None
    weyl_square: Rational | None

    @property
    def valid(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if not c.passed)


def apply_move(d: PolygonDatum, move: DihedralMove) -> PolygonDatum:
    """Relabel the sides of a polygon by a dihedral move."""
    n = d.n
    src = [move.source_index(n, i) for i in range(1, n + 1)]
    pairings = tuple(
        d.pair(src[i - 1], src[j - 1])
        for i in range(1, n + 1)
        for j in range(i + 1, n + 1)
    )
    lam = tuple(d.lam[s - 1] for s in src)
    return PolygonDatum(n, pairings, lam)


def all_moves(n: int) -> tuple[DihedralMove, ...]:
    """The 2n dihedral relabellings of an n-gon."""
    return tuple(
        DihedralMove(t, refl) for refl in (False, True) for t in range(n)
    )


def assemble_gram(d: SidesDatum) -> QMatrix:
    """Gram matrix ((delta_i, delta_j)) of the sides, diagonal 2."""
    n = d.size
    return QMatrix.from_rows(
        [[d.pair(i, j) for j in range(1, n + 1)] for i in range(1, n + 1)]
    )


def weyl_vector(g3: QMatrix, lam3: Sequence[int]) -> WeylData:
    """Solve (rho, delta_i) = -lambda_i on a hyperbolic 3x3 Gram block.

    The coordinates are in the basis (delta_1, delta_2, delta_3) and
    r = (rho, rho) = -(lambda_1 x_1 + lambda_2 x_2 + lambda_3 x_3).
    """
    if g3.rows != 3 or g3.cols != 3:
        raise NotHyperbolicError("expected a 3x3 Gram block")
    if det(g3) >= 0:
        raise NotHyperbolicError("Gram block is not hyperbolic (det >= 0)")
    x = solve(g3, [-l for l in lam3])
    r = -sum((Fraction(l) * xi for l, xi in zip(lam3, x)), Fraction(0))
    return WeylData((x[0], x[1], x[2]), r)


def divisibility_ok(lam_i: int, lam_j: int, g_ij: int) -> bool:
    """Twisting condition for the ordered pair (i, j): lambda_i | lambda_j * g_ij."""
    return (lam_j * g_ij) % lam_i == 0


def cartan_matrix(d: SidesDatum) -> CartanMatrix:
    """Twisted generalized Cartan matrix a_jk = lambda_k (delta_j, delta_k) / lambda_j."""
    n = d.size
    lam = d.lam
    bad = [
        (j, k)
        for j in range(1, n + 1)
        for k in range(1, n + 1)
        if j != k and not divisibility_ok(lam[j - 1], lam[k - 1], d.pair(j, k))
    ]
    if bad:
        raise InvalidRealizationError(f"divisibility fails for ordered pairs {bad}")
    entries = tuple(
        tuple(
            2 if j == k else lam[k - 1] * d.pair(j, k) // lam[j - 1]
            for k in range(1, n + 1)
        )
        for j in range(1, n + 1)
    )
    for j in range(n):
        for k in range(n):
            assert (entries[j][k] == 0) == (entries[k][j] == 0)
    return CartanMatrix(entries, tuple(Fraction(1, l * l) for l in lam))


def symmetrized_cartan(d: SidesDatum) -> SymmetrizedCartan:
    """Symmetric matrix b_jk = lambda_j lambda_k (delta_j, delta_k)."""
    n = d.size
    lam = d.lam
    entries = tuple(
        tuple(lam[j - 1] * lam[k - 1] * d.pair(j, k) for k in range(1, n + 1))
        for j in range(1, n + 1)
    )
    return SymmetrizedCartan(entries)


def reflect(
    x: Sequence[Rational | int], i: int, g3: QMatrix
) -> tuple[Rational, Rational, Rational]:
    """Reflection in side i on coordinates in the (delta_1, delta_2, delta_3) basis.

    Since (delta_i, delta_i) = 2 this is x -> x - (delta_i, x) delta_i;
    the twisting coefficients scale away.
    """
    if i not in (1, 2, 3):
        raise IndexError("side index must be 1, 2 or 3")
    xs = tuple(Fraction(v) for v in x)
    coeff = sum((g3.entry(i - 1, j) * xs[j] for j in range(3)), Fraction(0))
    out = list(xs)
    out[i - 1] -= coeff
    return (out[0], out[1], out[2])


def polygon_table(d: PolygonDatum) -> GeometricRealizationTable:
    """Encode a polygon as its realization table.

    Row 1 lists the lambdas; row i+1, column j holds -(delta_j, delta_{j+i})
    with the second index cyclic.  For even n the last row runs through the
    full cycle, so each antipodal pairing appears twice.
    """
    n = d.n
    rows: list[tuple[int, ...]] = [d.lam]
    for dist in range(1, n // 2 + 1):
        rows.append(
            tuple(-d.pair(j, (j - 1 + dist) % n + 1) for j in range(1, n + 1))
        )
    return GeometricRealizationTable(tuple(rows))


def table_to_datum(t: GeometricRealizationTable) -> PolygonDatum:
    """Decode a realization table; inverse of polygon_table."""
    if len(t.rows) < 2:
        raise TableDecodeError("table needs a lambda row and at least one pairing row")
    n = len(t.rows[0])
    if n < 3:
        raise TableDecodeError("a polygon needs at least 3 sides")
    if any(len(row) != n for row in t.rows):
        raise TableDecodeError("ragged table rows")
    if len(t.rows) != 1 + n // 2:
        raise TableDecodeError(
            f"expected {1 + n // 2} rows for an {n}-gon, got {len(t.rows)}"
        )
    lam = t.rows[0]
    if any(l < 1 for l in lam):
        raise TableDecodeError("lambda row must be positive")
    pairings = [0] * pair_count(n)
    for dist in range(1, n // 2 + 1):
        for j in range(1, n + 1):
            value = t.rows[dist][j - 1]
            if value < 0:
                raise TableDecodeError(
                    f"positive pairing -({value}) at distance {dist}, column {j}"
                )
            k = (j - 1 + dist) % n + 1
            lo, hi = min(j, k), max(j, k)
            idx = pack_index(n, lo, hi)
            if 2 * dist == n and j > n // 2:
                if pairings[idx] != -value:
                    raise TableDecodeError(
                        f"antipodal row inconsistent at column {j}"
                    )
            else:
                pairings[idx] = -value
    return PolygonDatum(n, tuple(pairings), lam)


def _lorentzian_check(d: PolygonDatum) -> CheckResult:
    """Some independent side triple must span a Lorentzian (det < 0) block."""
    n = d.n
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            for k in range(j + 1, n + 1):
                sub = [
                    [d.pair(a, b) for b in (i, j, k)] for a in (i, j, k)
                ]
                dd = det_int_rows(sub)
                if dd != 0:
                    if dd < 0:
                        return CheckResult("lorentzian", True)
                    return CheckResult(
                        "lorentzian",
                        False,
                        f"triple ({i},{j},{k}) has det {dd} > 0",
                    )
    return CheckResult("lorentzian", False, "no nondegenerate side triple")


def verify_realization(d: PolygonDatum) -> RealizationReport:
    """Run every structural check on polygon data, reporting all failures.

    A valid datum has: Gram of rank 3 spanning a Lorentzian block,
    cyclic-adjacent pairings in {0, -1, -2}, all pairings <= 0, the
    twisting divisibility for every ordered pair, coprime lambdas, and a
    vector rho with (rho, delta_i) = -lambda_i for every side.  Together
    with the lambda row this is exactly the rank-3 test on the stacked
    (n+1) x n matrix.
    """
    checks: list[CheckResult] = []
    gram = assemble_gram(d)

    gram_rank = rank(gram)
    checks.append(
        CheckResult("rank", gram_rank == 3, f"Gram rank is {gram_rank}, need 3")
    )
    checks.append(_lorentzian_check(d))

    bad_adj = [
        (i, i % d.n + 1, d.pair(i, i % d.n + 1))
        for i in range(1, d.n + 1)
        if not -2 <= d.pair(i, i % d.n + 1) <= 0
    ]
    checks.append(
        CheckResult(
            "adjacent-pairings",
            not bad_adj,
            f"adjacent pairings outside [-2, 0]: {bad_adj}" if bad_adj else "",
        )
    )

    bad_sign = [
        (i, j)
        for i in range(1, d.n + 1)
        for j in range(i + 1, d.n + 1)
        if d.pair(i, j) > 0
    ]
    checks.append(
        CheckResult(
            "nonpositive-pairings",
            not bad_sign,
            f"positive pairings at {bad_sign}" if bad_sign else "",
        )
    )

    bad_div = [
        (i, j)
        for i in range(1, d.n + 1)
        for j in range(1, d.n + 1)
        if i != j and not divisibility_ok(d.lam[i - 1], d.lam[j - 1], d.pair(i, j))
    ]
    checks.append(
        CheckResult(
            "divisibility",
            not bad_div,
            f"divisibility fails for ordered pairs {bad_div}" if bad_div else "",
        )
    )

    g = gcd(*d.lam)
    checks.append(
        CheckResult("coprime-lambda", g == 1, f"gcd(lambda) = {g}" if g != 1 else "")
    )

    solution = solve_consistent(gram, [-l for l in d.lam])
    weyl_square: Rational | None = None
    if solution is None:
        checks.append(
            CheckResult(
                "weyl-vector", False, "no rho with (rho, delta_i) = -lambda_i"
            )
        )
    else:
        weyl_square = -sum(
            (Fraction(l) * x for l, x in zip(d.lam, solution)), Fraction(0)
        )
        checks.append(CheckResult("weyl-vector", True))

    return RealizationReport(d, tuple(checks), solution, weyl_square)


def classify_flags(d: PolygonDatum, w: WeylData | Rational) -> RealizationFlags:
    """Type, compactness and twisting flags of a realization.

    Elliptic means r < 0, parabolic means r = 0; compact means no adjacent
    pairing equals -2 (no vertex at infinity); untwisted means lambda = 1.
    """
    r = w.r if isinstance(w, WeylData) else Fraction(w)
    if r > 0:
        raise ValueError(f"Weyl square must be <= 0, got {r}")
    kind = "elliptic" if r < 0 else "parabolic"
    compact = all(p != -2 for p in d.adjacent_pairs())
    untwisted = all(l == 1 for l in d.lam)
    return RealizationFlags(kind, compact, untwisted)


def symmetry_group(d: PolygonDatum) -> SymmetryGroup:
    """Stabilizer of the decorated cyclic sequence inside the dihedral group."""
    n = d.n
    stab = [m for m in all_moves(n) if apply_move(d, m) == d]
    order = len(stab)
    rotations = sorted(m.shift for m in stab if not m.reflected and m.shift)
    reflections = sorted((m.shift for m in stab if m.reflected))
    gens: list[DihedralMove] = []
    if rotations:
        gens.append(DihedralMove(rotations[0], False))
    if reflections:
        gens.append(DihedralMove(reflections[0], True))
    if order == 1:
        kind, degree = "trivial", 1
    elif not reflections:
        kind, degree = "cyclic", order
    else:
        kind, degree = "dihedral", order // 2
    return SymmetryGroup(order, kind, degree, tuple(gens))
