"""Classification search for rank-3 realizations with a lattice Weyl vector.

The search works radius by radius.  It first collects every Weyl square
r < 0 attainable by a 3-window of consecutive sides within fixed bounds,
then seeds, for each fixed r, all 3-windows whose Weyl vector has square
exactly r, scanning the long pairing upward and relying on the monotone
growth of the square.  From there it repeatedly glues overlapping open
chains, computing the single unknown pairing from the Weyl-vector
equation (length 4) or by composing coordinates across the shared
window (length >= 5), until every chain has closed or died.

Closed polygons are deduplicated by dihedral canonical form, re-verified
and decorated; the final catalog depends only on (lambda_max, mode).
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from .canonical import PackedDatum, canonical_form
from .core import (
    PolygonDatum,
    Rational,
    WeylData,
    cartan_matrix,
    classify_flags,
    pack_index,
    pair_count,
    polygon_table,
    symmetrized_cartan,
    symmetry_group,
    verify_realization,
)
from .linalg import QMatrix, SingularMatrixError, det_int_rows, solve

# Radius-collection window bounds: adjacent pairings in [-2, 0], long
# pairing in (-15, 0].
ADJACENT_MAX = 2
RADIUS_B_MAX = 14
# Guard on the monotone scan of the long pairing; far beyond anything reachable.
B_HARD_CAP = 10000

DEFAULT_MAX_SIDES = 32


class EngineError(RuntimeError):
    pass


class MonotonicityCapError(EngineError):
    """The long-pairing scan ran past the hard cap without crossing the target."""


class InvariantViolation(EngineError):
    """An emitted solution failed re-verification; indicates an engine bug."""


@dataclass(frozen=True)
class ChainState:
    """An open chain of consecutive sides delta_1..delta_length.

    ``pairings`` is the packed strict upper triangle (signed values);
    ``weyl`` carries rho in the basis of the first three sides together
    with the run's fixed square r.
    """

    length: int
    pairings: tuple[int, ...]
    lam: tuple[int, ...]
    weyl: WeylData

    @property
    def size(self) -> int:
        return self.length

    def pair(self, i: int, j: int) -> int:
        if i == j:
            return 2
        if i > j:
            i, j = j, i
        return self.pairings[pack_index(self.length, i, j)]

    @property
    def closing_pair(self) -> int:
        return self.pair(1, self.length)


@dataclass(frozen=True)
class CatalogRecord:
    """One classified solution, canonical under dihedral relabelling."""

    r: Rational
    n: int
    body: tuple[int, ...]
    lam: tuple[int, ...]
    pairings: tuple[int, ...]
    table: tuple[tuple[int, ...], ...]
    cartan: tuple[tuple[int, ...], ...]
    symcartan: tuple[tuple[int, ...], ...]
    sym_order: int
    compact: bool
    untwisted: bool
    kind: str

    @property
    def sort_key(self) -> tuple:
        return (self.r, self.n, self.body)


@dataclass(frozen=True)
class CapEvent:
    r: Rational
    length: int


@dataclass(frozen=True)
class EnumerationResult:
    records: tuple[CatalogRecord, ...]
    cap_events: tuple[CapEvent, ...]


@dataclass(frozen=True)
class PeriodicChainReport:
    period: int
    signature: tuple[tuple[int, ...], ...]
    length: int
    lam: tuple[int, ...]
    pairings: tuple[int, ...]


@dataclass(frozen=True)
class ParabolicReport:
    records: tuple[CatalogRecord, ...]
    periodic: tuple[PeriodicChainReport, ...]
    capped_chains: int


# ---------------------------------------------------------------------------
# 3-window arithmetic (integer fast path)
#
# A window has pairings (delta_1,delta_2) = -a, (delta_1,delta_3) = -b,
# (delta_2,delta_3) = -c with a, b, c >= 0.  Its Gram determinant and the
# adjugate are small closed forms, so the Weyl square r = lam^T adj lam / det
# never touches a matrix routine.
# ---------------------------------------------------------------------------


def _window_det(a: int, b: int, c: int) -> int:
    return 8 - 2 * (a * a + b * b + c * c) - 2 * a * b * c


def _window_adjugate(a: int, b: int, c: int) -> tuple[int, int, int, int, int, int]:
    """(adj11, adj12, adj13, adj22, adj23, adj33) of the window Gram."""
    return (4 - c * c, 2 * a + b * c, a * c + 2 * b, 4 - b * b, 2 * c + a * b, 4 - a * a)


def _window_square_num(a: int, b: int, c: int, l1: int, l2: int, l3: int) -> int:
    """Numerator lam^T adj(g) lam of the Weyl square (denominator is det)."""
    a11, a12, a13, a22, a23, a33 = _window_adjugate(a, b, c)
    return (
        a11 * l1 * l1
        + a22 * l2 * l2
        + a33 * l3 * l3
        + 2 * (a12 * l1 * l2 + a13 * l1 * l3 + a23 * l2 * l3)
    )


def _adjacent_divisible(a: int, c: int, l1: int, l2: int, l3: int) -> bool:
    return (
        (l2 * a) % l1 == 0
        and (l1 * a) % l2 == 0
        and (l3 * c) % l2 == 0
        and (l2 * c) % l3 == 0
    )


def _long_divisible(b: int, l1: int, l3: int) -> bool:
    return (l3 * b) % l1 == 0 and (l1 * b) % l3 == 0


def _window_chain(a: int, b: int, c: int, lam: tuple[int, int, int]) -> ChainState:
    l1, l2, l3 = lam
    d = _window_det(a, b, c)
    a11, a12, a13, a22, a23, a33 = _window_adjugate(a, b, c)
    adj_lam = (
        a11 * l1 + a12 * l2 + a13 * l3,
        a12 * l1 + a22 * l2 + a23 * l3,
        a13 * l1 + a23 * l2 + a33 * l3,
    )
    coords = tuple(Fraction(-v, d) for v in adj_lam)
    r = Fraction(_window_square_num(a, b, c, l1, l2, l3), d)
    return ChainState(3, (-a, -b, -c), lam, WeylData(coords, r))


def _lambda_triples(lambda_max: int):
    return itertools.product(range(1, lambda_max + 1), repeat=3)


def collect_radii(lambda_max: int) -> tuple[Rational, ...]:
    """All Weyl squares r < 0 attainable by a bounded admissible 3-window.

    The long pairing is scanned over [0, 14]; adjacent pairings over
    [0, 2]; lambdas over [1, lambda_max]^3 with the twisting
    divisibility for every ordered pair.  Sorted ascending.
    """
    if lambda_max < 1:
        raise ValueError("lambda_max must be >= 1")
    radii: set[Fraction] = set()
    for a in range(ADJACENT_MAX + 1):
        for c in range(ADJACENT_MAX + 1):
            for l1, l2, l3 in _lambda_triples(lambda_max):
                if not _adjacent_divisible(a, c, l1, l2, l3):
                    continue
                for b in range(RADIUS_B_MAX + 1):
                    if not _long_divisible(b, l1, l3):
                        continue
                    d = _window_det(a, b, c)
                    if d >= 0:
                        continue
                    num = _window_square_num(a, b, c, l1, l2, l3)
                    if num <= 0:  # r = num/d with d < 0, so r < 0 iff num > 0
                        continue
                    radii.add(Fraction(num, d))
    return tuple(sorted(radii))


def seed_triples(
    r: Rational | int,
    lambda_max: int,
    *,
    b_cap: int = B_HARD_CAP,
    exhaustive_to: int | None = None,
) -> list[ChainState]:
    """All 3-windows whose Weyl square is exactly r (r <= 0).

    The long pairing is scanned upward from 0: first past the
    non-hyperbolic range, then while the square is below r, stopping as
    soon as it exceeds r.  ``exhaustive_to`` switches to a full scan up
    to that bound (debug mode, no monotonicity assumption).
    """
    target = Fraction(r)
    if target > 0:
        raise ValueError("the Weyl square of a seed window is never positive")
    out: list[ChainState] = []
    for a in range(ADJACENT_MAX + 1):
        for c in range(ADJACENT_MAX + 1):
            for lam in _lambda_triples(lambda_max):
                l1, l2, l3 = lam
                if not _adjacent_divisible(a, c, l1, l2, l3):
                    continue
                if exhaustive_to is not None:
                    for b in range(exhaustive_to + 1):
                        d = _window_det(a, b, c)
                        if d >= 0:
                            continue
                        if Fraction(_window_square_num(a, b, c, *lam), d) == target:
                            if _long_divisible(b, l1, l3):
                                out.append(_window_chain(a, b, c, lam))
                    continue
                b = 0
                while True:
                    if b > b_cap:
                        raise MonotonicityCapError(
                            f"window (a={a}, c={c}, lam={lam}) scanned past "
                            f"b={b_cap} without crossing r={target}"
                        )
                    d = _window_det(a, b, c)
                    if d < 0:
                        rp = Fraction(_window_square_num(a, b, c, *lam), d)
                        if rp > target:
                            break
                        if rp == target:
                            if _long_divisible(b, l1, l3):
                                out.append(_window_chain(a, b, c, lam))
                            break
                    b += 1
    return out


def _seed_map(
    lambda_max: int, *, b_cap: int = B_HARD_CAP
) -> dict[Fraction, list[ChainState]]:
    """Seeds for every radius of collect_radii(lambda_max), in one sweep.

    Equivalent to calling seed_triples per radius; the single upward scan
    per window shape buckets matches by their square instead.
    """
    targets = set(collect_radii(lambda_max))
    if not targets:
        return {}
    r_max = max(targets)
    buckets: dict[Fraction, list[ChainState]] = {r: [] for r in targets}
    for a in range(ADJACENT_MAX + 1):
        for c in range(ADJACENT_MAX + 1):
            for lam in _lambda_triples(lambda_max):
                l1, l2, l3 = lam
                if not _adjacent_divisible(a, c, l1, l2, l3):
                    continue
                b = 0
                while True:
                    if b > b_cap:
                        raise MonotonicityCapError(
                            f"window (a={a}, c={c}, lam={lam}) scanned past b={b_cap}"
                        )
                    d = _window_det(a, b, c)
                    if d < 0:
                        rp = Fraction(_window_square_num(a, b, c, *lam), d)
                        if rp > r_max:
                            break
                        if rp in targets and _long_divisible(b, l1, l3):
                            buckets[rp].append(_window_chain(a, b, c, lam))
                    b += 1
    return buckets


def partition_closed(
    chains: list[ChainState],
) -> tuple[list[PolygonDatum], list[ChainState]]:
    """Split chains at the closure threshold (delta_1, delta_length) >= -2.

    Closed chains become polygons, kept only with coprime lambdas;
    the rest are returned for extension.
    """
    closed: list[PolygonDatum] = []
    extendable: list[ChainState] = []
    for ch in chains:
        if ch.closing_pair >= -2:
            if gcd(*ch.lam) == 1:
                closed.append(PolygonDatum(ch.length, ch.pairings, ch.lam))
        else:
            extendable.append(ch)
    return closed, extendable


def _head_key(ch: ChainState) -> tuple:
    m = ch.length
    pairs = tuple(
        ch.pair(i, j) for i in range(1, m) for j in range(i + 1, m)
    )
    return pairs + ch.lam[: m - 1]


def _tail_key(ch: ChainState) -> tuple:
    m = ch.length
    pairs = tuple(
        ch.pair(i, j) for i in range(2, m + 1) for j in range(i + 1, m + 1)
    )
    return pairs + ch.lam[1:]


def _det4(p12: int, p13: int, p14: int, p23: int, p24: int, p34: int) -> int:
    return det_int_rows(
        [
            [2, p12, p13, p14],
            [p12, 2, p23, p24],
            [p13, p23, 2, p34],
            [p14, p24, p34, 2],
        ]
    )


def _rational_quadratic_roots(
    alpha: int, beta: int, gamma: int
) -> list[Fraction]:
    """Rational roots of alpha t^2 + beta t + gamma = 0 (not identically zero)."""
    if alpha == 0:
        if beta == 0:
            if gamma == 0:
                raise InvariantViolation("degenerate rank condition: 0 = 0")
            return []
        return [Fraction(-gamma, beta)]
    disc = beta * beta - 4 * alpha * gamma
    if disc < 0:
        return []
    s = isqrt(disc)
    if s * s != disc:
        return []
    roots = {Fraction(-beta + s, 2 * alpha), Fraction(-beta - s, 2 * alpha)}
    return sorted(roots)


def _window_gram(p12: int, p13: int, p23: int) -> QMatrix:
    return QMatrix.from_rows([[2, p12, p13], [p12, 2, p23], [p13, p23, 2]])


def _divisible_both(l1: int, ln: int, g: int) -> bool:
    return (ln * g) % l1 == 0 and (l1 * g) % ln == 0


def _extended_chain(x: ChainState, y: ChainState, g1n: int) -> ChainState:
    m = x.length
    n = m + 1
    newp: list[int] = [x.pair(1, j) for j in range(2, m + 1)]
    newp.append(g1n)
    for i in range(2, n + 1):
        for j in range(i + 1, n + 1):
            newp.append(y.pair(i - 1, j - 1))
    lam = (x.lam[0],) + y.lam
    return ChainState(n, tuple(newp), lam, x.weyl)


def _glue(x: ChainState, y: ChainState) -> list[ChainState]:
    """Extensions of chain x by the last side of an overlapping chain y.

    The overlap (x sides 2..m against y sides 1..m-1) is assumed checked.
    Only the pairing (delta_1, delta_n) is unknown; it must come out a
    non-positive integer satisfying divisibility against both lambdas.
    """
    m = x.length
    l1 = x.lam[0]
    ln = y.lam[-1]
    if m == 3:
        ra = x.weyl.coords
        g24 = y.pair(1, 3)
        g34 = y.pair(2, 3)
        if ra[0] != 0:
            g14_exact = (-ln - ra[1] * g24 - ra[2] * g34) / ra[0]
            candidates = [g14_exact]
        else:
            # rho misses the first coordinate: the Weyl equation cannot see
            # g14, so fall back to the vanishing of the 4x4 determinant.
            if ra[1] * g24 + ra[2] * g34 != -ln:
                return []
            f0 = _det4(x.pair(1, 2), x.pair(1, 3), 0, x.pair(2, 3), g24, g34)
            f1 = _det4(x.pair(1, 2), x.pair(1, 3), 1, x.pair(2, 3), g24, g34)
            f_1 = _det4(x.pair(1, 2), x.pair(1, 3), -1, x.pair(2, 3), g24, g34)
            alpha = (f1 + f_1) // 2 - f0
            beta = (f1 - f_1) // 2
            candidates = _rational_quadratic_roots(alpha, beta, f0)
        out: list[ChainState] = []
        for cand in candidates:
            if cand.denominator != 1:
                continue
            g14 = int(cand)
            if g14 > 0:
                continue
            if not _divisible_both(l1, ln, g14):
                continue
            if _det4(x.pair(1, 2), x.pair(1, 3), g14, x.pair(2, 3), g24, g34) != 0:
                continue
            out.append(_extended_chain(x, y, g14))
        return out

    # Length >= 4: express delta_n through the shared window.  delta_4 has
    # known pairings against x's first window, and delta_n against the
    # window (delta_2, delta_3, delta_4) of y; composing the coordinates
    # gives (delta_1, delta_n) directly, rank 3 holds by construction.
    try:
        gx = _window_gram(x.pair(1, 2), x.pair(1, 3), x.pair(2, 3))
        d4 = solve(gx, [x.pair(1, 4), x.pair(2, 4), x.pair(3, 4)])
        gy = _window_gram(y.pair(1, 2), y.pair(1, 3), y.pair(2, 3))
        dn_in_y = solve(gy, [y.pair(1, m), y.pair(2, m), y.pair(3, m)])
    except SingularMatrixError as exc:  # hyperbolic windows are never singular
        raise InvariantViolation(f"degenerate chain window: {exc}") from exc
    v = (
        dn_in_y[2] * d4[0],
        dn_in_y[0] + dn_in_y[2] * d4[1],
        dn_in_y[1] + dn_in_y[2] * d4[2],
    )
    g1n_exact = 2 * v[0] + x.pair(1, 2) * v[1] + x.pair(1, 3) * v[2]
    if g1n_exact.denominator != 1:
        return []
    g1n = int(g1n_exact)
    if g1n > 0:
        return []
    if not _divisible_both(l1, ln, g1n):
        return []
    return [_extended_chain(x, y, g1n)]


def extend_step(
    extendable: list[ChainState], r: Rational, lambda_max: int
) -> list[ChainState]:
    """One gluing round: all chains one side longer.

    Matches ordered pairs (X, Y) whose overlap agrees (X's sides 2..m
    carry the same pairings and lambdas as Y's sides 1..m-1) via a hash
    join, then computes the unknown closing-side pairing for each pair.
    """
    if extendable:
        m = extendable[0].length
        for ch in extendable:
            if ch.length != m:
                raise EngineError("extend_step needs chains of equal length")
            if ch.closing_pair >= -2:
                raise EngineError("extend_step received a closed chain")
    by_head: dict[tuple, list[ChainState]] = {}
    for ch in extendable:
        by_head.setdefault(_head_key(ch), []).append(ch)
    out: list[ChainState] = []
    for x in extendable:
        for y in by_head.get(_tail_key(x), ()):
            out.extend(_glue(x, y))
    return out


# ---------------------------------------------------------------------------
# Full runs
# ---------------------------------------------------------------------------


def _record_from_canonical(r: Fraction, packed: PackedDatum) -> CatalogRecord:
    d = packed.to_polygon()
    report = verify_realization(d)
    if not report.valid:
        raise InvariantViolation(
            f"emitted datum fails verification: {report.failures()}"
        )
    if report.weyl_square != r:
        raise InvariantViolation(
            f"emitted datum has square {report.weyl_square}, expected {r}"
        )
    flags = classify_flags(d, report.weyl_square)
    sym = symmetry_group(d)
    return CatalogRecord(
        r=r,
        n=d.n,
        body=packed.body,
        lam=d.lam,
        pairings=d.pairings,
        table=polygon_table(d).rows,
        cartan=cartan_matrix(d).entries,
        symcartan=symmetrized_cartan(d).entries,
        sym_order=sym.order,
        compact=flags.compact,
        untwisted=flags.untwisted,
        kind=flags.kind,
    )


def _dedup_records(r: Fraction, closed: list[PolygonDatum]) -> list[CatalogRecord]:
    canon: dict[tuple[int, tuple[int, ...]], PackedDatum] = {}
    for poly in closed:
        c = canonical_form(PackedDatum.from_polygon(poly))
        canon[(c.n, c.body)] = c
    return [
        _record_from_canonical(r, canon[key])
        for key in sorted(canon.keys())
    ]


def _run_radius(
    task: tuple[Fraction, tuple[ChainState, ...], int, int],
) -> tuple[list[CatalogRecord], CapEvent | None]:
    r, seeds, lambda_max, max_sides = task
    chains = list(seeds)
    closed_all: list[PolygonDatum] = []
    cap: CapEvent | None = None
    while chains:
        closed, ext = partition_closed(chains)
        closed_all.extend(closed)
        if not ext:
            break
        if ext[0].length >= max_sides:
            cap = CapEvent(r, ext[0].length)
            break
        chains = extend_step(ext, r, lambda_max)
    return _dedup_records(r, closed_all), cap


def run_elliptic(
    lambda_max: int,
    max_sides: int = DEFAULT_MAX_SIDES,
    *,
    jobs: int = 1,
    r_filter: Rational | None = None,
) -> EnumerationResult:
    """The full elliptic classification for lambda_i <= lambda_max.

    Deterministic: the catalog is sorted by (r, n, canonical body) and
    does not depend on ``jobs``.  Hitting ``max_sides`` on a live chain
    is reported as a cap event, and that radius's output is partial.
    """
    if lambda_max < 1:
        raise ValueError("lambda_max must be >= 1")
    if max_sides < 3:
        raise ValueError("max_sides must be >= 3")
    seed_map = _seed_map(lambda_max)
    radii = sorted(seed_map)
    if r_filter is not None:
        wanted = Fraction(r_filter)
        radii = [r for r in radii if r == wanted]
    tasks = [
        (r, tuple(seed_map[r]), lambda_max, max_sides) for r in radii
    ]
    if jobs <= 1 or len(tasks) <= 1:
        results = [_run_radius(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (jobs * 8))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_radius, tasks, chunksize=chunk))
    records: list[CatalogRecord] = []
    caps: list[CapEvent] = []
    for recs, cap in results:
        records.extend(recs)
        if cap is not None:
            caps.append(cap)
    records.sort(key=lambda rec: rec.sort_key)
    caps.sort(key=lambda e: (e.r, e.length))
    return EnumerationResult(tuple(records), tuple(caps))


def _chain_windows(ch: ChainState) -> list[tuple[int, ...]]:
    """Decorated 3-window states along an open chain."""
    return [
        (
            ch.pair(i, i + 1),
            ch.pair(i, i + 2),
            ch.pair(i + 1, i + 2),
            ch.lam[i - 1],
            ch.lam[i],
            ch.lam[i + 1],
        )
        for i in range(1, ch.length - 1)
    ]


def _min_rotation(block: tuple[tuple[int, ...], ...]) -> tuple[tuple[int, ...], ...]:
    return min(
        tuple(block[k:] + block[:k]) for k in range(len(block))
    )


def _detect_period(ch: ChainState) -> PeriodicChainReport | None:
    """Report a recurring decorated 3-window state, if the newest one repeats."""
    windows = _chain_windows(ch)
    last = windows[-1]
    for i, w in enumerate(windows[:-1]):
        if w == last:
            block = tuple(windows[i:-1])
            return PeriodicChainReport(
                period=len(windows) - 1 - i,
                signature=_min_rotation(block),
                length=ch.length,
                lam=ch.lam,
                pairings=ch.pairings,
            )
    return None


def run_parabolic(
    lambda_max: int,
    max_sides: int = DEFAULT_MAX_SIDES,
    *,
    jobs: int = 1,
) -> ParabolicReport:
    """The r = 0 pipeline: closed polygons plus periodic-chain detection.

    Chains whose newest decorated 3-window state repeats an earlier one
    are reported with their period and a rotation-invariant signature
    instead of being extended further; anything still alive at
    ``max_sides`` is counted as capped.  Exploratory mode: the parabolic
    classification itself is out of scope here.
    """
    del jobs  # single radius; kept for interface symmetry
    if lambda_max < 1:
        raise ValueError("lambda_max must be >= 1")
    if max_sides < 3:
        raise ValueError("max_sides must be >= 3")
    chains = seed_triples(0, lambda_max)
    closed_all: list[PolygonDatum] = []
    periodic: dict[tuple, PeriodicChainReport] = {}
    capped = 0
    while chains:
        closed, ext = partition_closed(chains)
        closed_all.extend(closed)
        if not ext:
            break
        alive: list[ChainState] = []
        for ch in ext:
            rep = _detect_period(ch)
            if rep is not None:
                periodic.setdefault((rep.period, rep.signature), rep)
            else:
                alive.append(ch)
        if not alive:
            break
        if alive[0].length >= max_sides:
            capped = len(alive)
            break
        chains = extend_step(alive, Fraction(0), lambda_max)
    records = _dedup_records(Fraction(0), closed_all)
    reports = tuple(
        periodic[key] for key in sorted(periodic.keys())
    )
    return ParabolicReport(tuple(records), reports, capped)
