"""Exact rational linear algebra and convexity primitives.

Every scalar is a ``fractions.Fraction``; points are plain tuples of fractions so they
hash, compare lexicographically and pickle cheaply. Nothing here touches floating point.
"""

from __future__ import annotations

import math
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from itertools import combinations

import structlog

from transversals.errors import (
    DegenerateNormalError,
    DimensionMismatchError,
    InvalidInstanceError,
)
from transversals.utils.metrics import LP_SOLVES

logger = structlog.get_logger()

Rational = Fraction
Point = tuple[Fraction, ...]
SignVector = tuple[int, ...]

_RATIONAL_PATTERN = re.compile(r"^(-?\d+)(?:/(\d+))?$")


class HullMethod(StrEnum):
    """Algorithm used to decide origin membership in a convex hull."""

    SIMPLEX = "simplex"
    CARATHEODORY = "caratheodory"


def parse_rational(text: str) -> Fraction:
    """Parse the wire form ``"p/q"`` or ``"p"``."""
    match = _RATIONAL_PATTERN.match(text)
    if match is None:
        raise ValueError(f"malformed rational {text!r}")
    numerator, denominator = match.groups()
    if denominator is not None and int(denominator) == 0:
        raise ValueError("zero denominator")
    return Fraction(int(numerator), int(denominator) if denominator else 1)


def format_rational(value: Fraction | int) -> str:
    """Format a rational in canonical wire form (denominator omitted when 1)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def point(*coords: Fraction | int | str) -> Point:
    """Build a point from anything ``Fraction`` accepts."""
    return tuple(Fraction(c) for c in coords)


def sign(value: Fraction | int) -> int:
    return (value > 0) - (value < 0)


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b, strict=True)), Fraction(0))


def negate(p: Point) -> Point:
    return tuple(-x for x in p)


def add(a: Point, b: Point) -> Point:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def scale(p: Point, factor: Fraction | int) -> Point:
    return tuple(x * factor for x in p)


def subtract(a: Point, b: Point) -> Point:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def is_zero(p: Point) -> bool:
    return all(x == 0 for x in p)


def check_dimension(points: Iterable[Sequence[Fraction]], n: int) -> None:
    """Raise if any point does not live in R^n."""
    for index, p in enumerate(points):
        if len(p) != n:
            raise DimensionMismatchError(
                f"point {index} has dimension {len(p)}, expected {n}"
            )


def canonical_ray(a: Sequence[Fraction]) -> Point:
    """Scale a nonzero vector to primitive integers with first nonzero coordinate positive."""
    if all(x == 0 for x in a):
        raise DegenerateNormalError("the zero vector has no canonical ray")
    fractions = [Fraction(x) for x in a]
    common = math.lcm(*(x.denominator for x in fractions))
    integers = [x.numerator * (common // x.denominator) for x in fractions]
    divisor = math.gcd(*integers)
    integers = [x // divisor for x in integers]
    leading = next(x for x in integers if x != 0)
    if leading < 0:
        integers = [-x for x in integers]
    return tuple(Fraction(x) for x in integers)


# Linear algebra ------------------------------------------------------------------------


def row_reduce(
    rows: Sequence[Sequence[Fraction | int]], ncols: int
) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; pivots are searched in the first ``ncols`` columns only."""
    matrix = [[Fraction(x) for x in row] for row in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(matrix):
            break
        found = next((i for i in range(r, len(matrix)) if matrix[i][c] != 0), None)
        if found is None:
            continue
        matrix[r], matrix[found] = matrix[found], matrix[r]
        head = matrix[r][c]
        matrix[r] = [x / head for x in matrix[r]]
        for i in range(len(matrix)):
            factor = matrix[i][c]
            if i != r and factor != 0:
                matrix[i] = [x - factor * y for x, y in zip(matrix[i], matrix[r], strict=True)]
        pivots.append(c)
        r += 1
    return matrix, pivots


def rank_of_vectors(vectors: Sequence[Point], n: int) -> int:
    """Linear rank over the rationals (0 for the empty list)."""
    check_dimension(vectors, n)
    if not vectors:
        return 0
    return len(row_reduce(vectors, n)[1])


def null_space_basis(vectors: Sequence[Point], n: int) -> list[Point]:
    """Basis of {a : a·v = 0 for all v}, one vector per free column."""
    check_dimension(vectors, n)
    matrix, pivots = row_reduce(vectors, n) if vectors else ([], [])
    basis: list[Point] = []
    for free in (c for c in range(n) if c not in pivots):
        solution = [Fraction(0)] * n
        solution[free] = Fraction(1)
        for row, pivot in zip(matrix, pivots, strict=False):
            solution[pivot] = -row[free]
        basis.append(tuple(solution))
    return basis


def null_space_ray(vectors: Sequence[Point], n: int) -> Point | None:
    """Canonical generator of the common null space when it is a line, else None."""
    basis = null_space_basis(vectors, n)
    if len(basis) != 1:
        return None
    return canonical_ray(basis[0])


def solve_linear(
    rows: Sequence[Sequence[Fraction | int]], rhs: Sequence[Fraction | int], n_vars: int
) -> list[Fraction] | None:
    """A particular solution of ``rows · x = rhs`` (free variables zero), or None."""
    augmented = [list(row) + [b] for row, b in zip(rows, rhs, strict=True)]
    matrix, pivots = row_reduce(augmented, n_vars)
    for row in matrix[len(pivots):]:
        if row[n_vars] != 0:
            return None
    solution = [Fraction(0)] * n_vars
    for row, pivot in zip(matrix, pivots, strict=False):
        solution[pivot] = row[n_vars]
    return solution


def sign_vector(a: Point, pool: Sequence[Point]) -> SignVector:
    """Signs of a·v for every v in the pool."""
    if is_zero(a):
        raise DegenerateNormalError("a zero normal does not determine a cell")
    check_dimension(pool, len(a))
    return tuple(sign(dot(a, v)) for v in pool)


# Exact feasibility ---------------------------------------------------------------------


def feasible_nonnegative(
    rows: Sequence[Sequence[Fraction | int]], rhs: Sequence[Fraction | int], n_vars: int
) -> list[Fraction] | None:
    """Find y >= 0 with ``rows · y = rhs`` by an exact phase-one simplex.

    Artificial variables start in the basis and are dropped for good once they leave.
    Entering and leaving choices follow Bland's rule, so the method terminates.
    """
    if not rows:
        return [Fraction(0)] * n_vars

    tableau: list[list[Fraction]] = []
    for row, b in zip(rows, rhs, strict=True):
        entries = [Fraction(x) for x in row] + [Fraction(b)]
        if entries[-1] < 0:
            entries = [-x for x in entries]
        tableau.append(entries)
    m = len(tableau)
    basis = [n_vars + i for i in range(m)]
    costs = [-sum((tableau[i][j] for i in range(m)), Fraction(0)) for j in range(n_vars + 1)]

    while True:
        entering = next((j for j in range(n_vars) if costs[j] < 0), None)
        if entering is None:
            break
        leaving: int | None = None
        best: Fraction | None = None
        for i in range(m):
            coeff = tableau[i][entering]
            if coeff <= 0:
                continue
            ratio = tableau[i][n_vars] / coeff
            if best is None or ratio < best or (ratio == best and basis[i] < basis[leaving]):
                best, leaving = ratio, i
        if leaving is None:
            # Unbounded direction cannot occur: the phase-one objective is bounded below.
            break
        _pivot(tableau, costs, leaving, entering)
        basis[leaving] = entering

    if costs[n_vars] != 0:
        LP_SOLVES.labels(outcome="infeasible").inc()
        return None
    solution = [Fraction(0)] * n_vars
    for i, var in enumerate(basis):
        if var < n_vars:
            solution[var] = tableau[i][n_vars]
    LP_SOLVES.labels(outcome="feasible").inc()
    return solution


def _pivot(tableau: list[list[Fraction]], costs: list[Fraction], r: int, c: int) -> None:
    head = tableau[r][c]
    tableau[r] = [x / head for x in tableau[r]]
    for i, row in enumerate(tableau):
        factor = row[c]
        if i != r and factor != 0:
            tableau[i] = [x - factor * y for x, y in zip(row, tableau[r], strict=True)]
    factor = costs[c]
    if factor != 0:
        costs[:] = [x - factor * y for x, y in zip(costs, tableau[r], strict=True)]


def origin_in_hull(
    points: Sequence[Point], n: int, method: HullMethod = HullMethod.SIMPLEX
) -> bool:
    """True iff the zero vector of R^n is a convex combination of the points."""
    check_dimension(points, n)
    if not points:
        return False
    distinct = list(dict.fromkeys(points))
    if HullMethod(method) is HullMethod.CARATHEODORY:
        return _origin_in_hull_caratheodory(distinct, n)
    rows = [[p[i] for p in distinct] for i in range(n)]
    rows.append([Fraction(1)] * len(distinct))
    rhs = [Fraction(0)] * n + [Fraction(1)]
    return feasible_nonnegative(rows, rhs, len(distinct)) is not None


def _origin_in_hull_caratheodory(points: list[Point], n: int) -> bool:
    # Affinely independent subsets have unique coefficients; dependent subsets may only
    # add redundant witnesses, so testing the particular solution of each subset is exact.
    for size in range(1, min(n + 1, len(points)) + 1):
        for subset in combinations(points, size):
            rows = [[p[i] for p in subset] for i in range(n)]
            rows.append([Fraction(1)] * size)
            coefficients = solve_linear(rows, [0] * n + [1], size)
            if coefficients is not None and all(c >= 0 for c in coefficients):
                return True
    return False


def point_sets_intersect(first: Sequence[Point], second: Sequence[Point], n: int) -> bool:
    """True iff conv(first) and conv(second) meet, via the difference-hull reduction."""
    check_dimension(first, n)
    check_dimension(second, n)
    differences = list(dict.fromkeys(subtract(u, w) for u in first for w in second))
    return origin_in_hull(differences, n)


def realize_sign_vector(sigma: SignVector, pool: Sequence[Point], n: int) -> Point | None:
    """A nonzero rational normal a with sign_vector(a, pool) == sigma, or None."""
    if len(sigma) != len(pool):
        raise DimensionMismatchError(f"sign vector has {len(sigma)} entries for {len(pool)} vectors")
    check_dimension(pool, n)
    if all(s == 0 for s in sigma):
        basis = null_space_basis(pool, n)
        return canonical_ray(basis[0]) if basis else None

    # a = p - q with p, q >= 0; one surplus variable per strict inequality s·(a·v) >= 1.
    strict_rows = [i for i, s in enumerate(sigma) if s != 0]
    n_vars = 2 * n + len(strict_rows)
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for i, (s, v) in enumerate(zip(sigma, pool, strict=True)):
        row = [Fraction(0)] * n_vars
        factor = s if s != 0 else 1
        for j in range(n):
            row[j] = factor * v[j]
            row[n + j] = -factor * v[j]
        if s != 0:
            row[2 * n + strict_rows.index(i)] = Fraction(-1)
        rows.append(row)
        rhs.append(Fraction(1) if s != 0 else Fraction(0))
    solution = feasible_nonnegative(rows, rhs, n_vars)
    if solution is None:
        return None
    return tuple(solution[j] - solution[n + j] for j in range(n))


# Polytopes -----------------------------------------------------------------------------


@dataclass(frozen=True)
class Polytope:
    """A labeled V-polytope: the convex hull of a nonempty vertex list.

    Listed vertices need not be extreme and are never pruned.
    """

    id: str
    vertices: tuple[Point, ...]

    def __post_init__(self) -> None:
        if not self.vertices:
            raise InvalidInstanceError(f"polytope {self.id!r} has no vertices")
        normalized = tuple(tuple(Fraction(x) for x in v) for v in self.vertices)
        dims = {len(v) for v in normalized}
        if len(dims) != 1:
            raise DimensionMismatchError(f"polytope {self.id!r} mixes dimensions {sorted(dims)}")
        object.__setattr__(self, "vertices", normalized)

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    def negated(self, new_id: str) -> Polytope:
        return Polytope(new_id, tuple(negate(v) for v in self.vertices))

    def lifted(self, height: Fraction | int = 1) -> Polytope:
        """Embed in one dimension higher at the given last coordinate."""
        return Polytope(self.id, tuple(v + (Fraction(height),) for v in self.vertices))


def hulls_intersect(first: Polytope, second: Polytope) -> bool:
    """True iff the convex hulls of the two vertex lists meet."""
    if first.dim != second.dim:
        raise DimensionMismatchError(
            f"{first.id!r} has dimension {first.dim} but {second.id!r} has {second.dim}"
        )
    return point_sets_intersect(first.vertices, second.vertices, first.dim)
