"""Hyperplane transversals and the covector cell complex of a central arrangement."""

from __future__ import annotations

from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from typing import Any

import structlog

from transversals.config import get_settings
from transversals.errors import (
    CapExceededError,
    DegenerateNormalError,
    DimensionMismatchError,
    InvalidInstanceError,
    InvariantError,
)
from transversals.services.geometry import (
    Point,
    Polytope,
    SignVector,
    add,
    canonical_ray,
    check_dimension,
    dot,
    format_rational,
    is_zero,
    negate,
    null_space_basis,
    null_space_ray,
    rank_of_vectors,
    realize_sign_vector,
    scale,
    sign_vector,
    solve_linear,
)
from transversals.services.lifting import Instance, LiftedInstance
from transversals.services.matroids import Label
from transversals.utils.metrics import COVECTORS, TRANSVERSAL_CANDIDATES

logger = structlog.get_logger()

_SIGN_SYMBOLS = {1: "+", 0: "0", -1: "-"}


def format_signs(signs: SignVector) -> str:
    return "".join(_SIGN_SYMBOLS[s] for s in signs)


def conformal(smaller: SignVector, larger: SignVector) -> bool:
    """True iff every entry of ``smaller`` is 0 or agrees with ``larger``."""
    return all(s == 0 or s == t for s, t in zip(smaller, larger, strict=True))


def compose(first: SignVector, second: SignVector) -> SignVector:
    return tuple(s if s != 0 else t for s, t in zip(first, second, strict=True))


# Hyperplanes -------------------------------------------------------------------------------


@dataclass(frozen=True)
class Hyperplane:
    """The affine hyperplane {x : normal·x = offset} with a canonical normal."""

    normal: Point
    offset: Fraction

    @classmethod
    def canonical(cls, normal: Sequence[Fraction], offset: Fraction) -> Hyperplane:
        if all(x == 0 for x in normal):
            raise DegenerateNormalError("a hyperplane needs a nonzero normal")
        scaled = canonical_ray(normal)
        lead = next(i for i, x in enumerate(normal) if x != 0)
        factor = scaled[lead] / Fraction(normal[lead])
        return cls(scaled, Fraction(offset) * factor)

    @classmethod
    def coordinate(cls, d: int) -> Hyperplane:
        """The first coordinate hyperplane x_1 = 0."""
        return cls(tuple(Fraction(int(i == 0)) for i in range(d)), Fraction(0))

    def meets(self, polytope: Polytope) -> bool:
        """Exact slab test: min normal·v <= offset <= max normal·v."""
        values = [dot(self.normal, v) for v in polytope.vertices]
        return min(values) <= self.offset <= max(values)

    def to_dict(self) -> dict[str, Any]:
        return {
            "normal": [format_rational(x) for x in self.normal],
            "offset": format_rational(self.offset),
        }


def transversal_predicate(a: Point, polys: Sequence[Polytope], n: int) -> bool:
    """True iff the central hyperplane a^⊥ meets every polytope."""
    if is_zero(a):
        raise DegenerateNormalError("a transversal normal must be nonzero")
    check_dimension([a], n)
    for polytope in polys:
        check_dimension(polytope.vertices, n)
        values = [dot(a, v) for v in polytope.vertices]
        if not min(values) <= 0 <= max(values):
            return False
    return True


def find_origin_transversal(
    polys: Sequence[Polytope],
    n: int,
    accept: Callable[[Point], bool] | None = None,
) -> Point | None:
    """Canonically smallest normal of a central hyperplane meeting every polytope.

    Candidates are null rays of (n−1)-subsets of the vertex directions plus the standard
    basis. With the basis added the arrangement is essential, so every nonempty closed
    feasible cell is a pointed cone whose extreme rays are among the candidates.
    """
    vertices = [v for polytope in polys for v in polytope.vertices]
    check_dimension(vertices, n)
    directions = list(dict.fromkeys(canonical_ray(v) for v in vertices if not is_zero(v)))
    for i in range(n):
        basis_vector = tuple(Fraction(int(j == i)) for j in range(n))
        if basis_vector not in directions:
            directions.append(basis_vector)

    candidates: set[Point] = set()
    for subset in combinations(directions, n - 1):
        ray = null_space_ray(list(subset), n)
        if ray is not None:
            candidates.add(ray)

    for a in sorted(candidates):
        TRANSVERSAL_CANDIDATES.inc()
        if accept is not None and not accept(a):
            continue
        if transversal_predicate(a, polys, n):
            return a
    return None


def find_affine_transversal(inst: Instance, members: Sequence[Label]) -> Hyperplane | None:
    """A hyperplane in R^d meeting every member of G, via G ∪ (−G) in R^{d+1}."""
    labels = list(dict.fromkeys(members))
    unknown = [x for x in labels if x not in inst.ids]
    if unknown:
        raise InvalidInstanceError(f"unknown ids {unknown}")
    if not labels:
        return Hyperplane.coordinate(inst.d)

    d = inst.d
    lifted = [inst.member(x).lifted(1) for x in labels]
    polys = lifted + [p.negated(f"-{p.id}") for p in lifted]

    def horizontal_part_nonzero(a: Point) -> bool:
        return not is_zero(a[:d])

    a = find_origin_transversal(polys, d + 1, accept=horizontal_part_nonzero)
    if a is None:
        return None
    return Hyperplane.canonical(a[:d], -a[d])


# Cell complex ------------------------------------------------------------------------------


@dataclass(frozen=True)
class Cell:
    """A cell of the sphere decomposition.

    Ordinary cells are indexed by a nonzero covector. When the pool does not span R^n the
    zero covector is realized by a whole sphere; it is instantiated as cross-polytope
    cells indexed by a nonzero ``residual`` sign pattern over a basis of the pool's
    orthogonal complement.
    """

    covector: SignVector
    residual: SignVector
    dim: int
    witness: Point = field(compare=False)

    def __neg__(self) -> Cell:
        return Cell(
            tuple(-s for s in self.covector),
            tuple(-s for s in self.residual),
            self.dim,
            negate(self.witness),
        )

    def is_face_of(self, other: Cell) -> bool:
        if not conformal(self.covector, other.covector):
            return False
        return not other.residual or conformal(self.residual, other.residual)

    @property
    def label(self) -> str:
        text = format_signs(self.covector)
        return f"{text}|{format_signs(self.residual)}" if self.residual else text

    def sort_key(self) -> tuple[int, SignVector, SignVector]:
        return (self.dim, self.covector, self.residual)


@dataclass(frozen=True, eq=False)
class CellComplex:
    """Realized covectors of the arrangement {v^⊥ : v in pool}, each with a witness."""

    pool: tuple[Point, ...]
    n: int
    covectors: Mapping[SignVector, Point]
    lineality: tuple[Point, ...]

    def dim_of(self, sigma: SignVector) -> int:
        """Dimension of the cell on the sphere: n − rank(zero set) − 1."""
        zeros = [v for s, v in zip(sigma, self.pool, strict=True) if s == 0]
        return self.n - rank_of_vectors(zeros, self.n) - 1

    def is_face(self, sigma: SignVector, tau: SignVector) -> bool:
        return conformal(sigma, tau)

    def sorted_covectors(self) -> list[SignVector]:
        return sorted(self.covectors, key=lambda s: (self.dim_of(s), s))

    @cached_property
    def cells(self) -> tuple[Cell, ...]:
        """Cells with multiplicity: the zero covector expands to its sphere's cells."""
        cells: list[Cell] = []
        for sigma, witness in self.covectors.items():
            if any(sigma):
                cells.append(Cell(sigma, (), self.dim_of(sigma), witness))
        if self.lineality and tuple(0 for _ in self.pool) in self.covectors:
            cells.extend(self._lineality_cells())
        cells.sort(key=Cell.sort_key)
        return tuple(cells)

    def _lineality_cells(self) -> list[Cell]:
        m = len(self.lineality)
        zero = tuple(0 for _ in self.pool)
        gram = [[dot(b, c) for c in self.lineality] for b in self.lineality]
        cells = []
        for pattern in product((-1, 0, 1), repeat=m):
            if not any(pattern):
                continue
            coefficients = solve_linear(gram, pattern, m)
            if coefficients is None:
                raise InvariantError("lineality basis has a singular Gram matrix")
            witness: Point = tuple(Fraction(0) for _ in range(self.n))
            for c, b in zip(coefficients, self.lineality, strict=True):
                witness = add(witness, scale(b, c))
            residual = tuple(int(dot(b, witness) > 0) - int(dot(b, witness) < 0) for b in self.lineality)
            if residual != pattern:
                raise InvariantError("lineality witness does not reproduce its pattern")
            cells.append(Cell(zero, pattern, sum(1 for s in pattern if s) - 1, witness))
        return cells


def _check_pool(pool: Sequence[Point], n: int, max_vertices: int | None, max_dimension: int | None) -> None:
    settings = get_settings()
    vertex_cap = settings.max_vertices if max_vertices is None else max_vertices
    dimension_cap = settings.max_dimension if max_dimension is None else max_dimension
    if len(pool) > vertex_cap:
        raise CapExceededError("vertex pool size", len(pool), vertex_cap, "--max-vertices")
    if n > dimension_cap:
        raise CapExceededError("dimension", n, dimension_cap, "TRANSVERSALS_MAX_DIMENSION")
    if not pool:
        raise InvalidInstanceError("the vertex pool is empty")
    check_dimension(pool, n)
    if any(is_zero(v) for v in pool):
        raise DegenerateNormalError("the vertex pool contains the zero vector")


def _perturbed_witness(w: Point, sigma: SignVector, u: Point, pool: Sequence[Point]) -> Point:
    # w + εu keeps every nonzero sign of w and takes the signs of u elsewhere.
    epsilon = Fraction(1)
    for s, v in zip(sigma, pool, strict=True):
        pushed = dot(u, v)
        if s != 0 and pushed != 0:
            epsilon = min(epsilon, abs(dot(w, v)) / abs(pushed) / 2)
    return add(w, scale(u, epsilon))


def enumerate_covectors(
    pool: Sequence[Point],
    n: int,
    *,
    max_vertices: int | None = None,
    max_dimension: int | None = None,
) -> CellComplex:
    """All nonzero-realizable sign vectors of the pool, each with an exact witness.

    Cocircuits are the null rays of rank-(r−1) subsets taken inside span(pool), where
    r = rank(pool); every covector is a composition of cocircuits, so closing the
    cocircuits under composition yields the whole set. Witnesses are built alongside by
    exact perturbation.
    """
    pool = tuple(pool)
    _check_pool(pool, n, max_vertices, max_dimension)
    r = rank_of_vectors(pool, n)
    lineality = tuple(null_space_basis(pool, n))

    directions = list(dict.fromkeys(canonical_ray(v) for v in pool))
    cocircuits: dict[SignVector, Point] = {}
    for subset in combinations(directions, r - 1):
        ray = null_space_ray(list(subset) + list(lineality), n)
        if ray is None:
            continue
        for w in (ray, negate(ray)):
            cocircuits.setdefault(sign_vector(w, pool), w)

    covectors: dict[SignVector, Point] = dict(cocircuits)
    frontier = list(cocircuits.items())
    while frontier:
        grown: list[tuple[SignVector, Point]] = []
        for sigma, w in frontier:
            for tau, u in cocircuits.items():
                composed = compose(sigma, tau)
                if composed in covectors:
                    continue
                witness = _perturbed_witness(w, sigma, u, pool)
                if sign_vector(witness, pool) != composed:
                    raise InvariantError("perturbed witness does not realize the composition")
                covectors[composed] = witness
                grown.append((composed, witness))
        frontier = grown

    if lineality:
        covectors[tuple(0 for _ in pool)] = canonical_ray(lineality[0])

    COVECTORS.inc(len(covectors))
    logger.debug("Covectors enumerated", pool=len(pool), n=n, covectors=len(covectors))
    ordered = {sigma: covectors[sigma] for sigma in sorted(covectors)}
    return CellComplex(pool, n, ordered, lineality)


def subfamily_of_cell(
    sigma: SignVector, lifted: LiftedInstance, cells: CellComplex | None = None
) -> frozenset[Label]:
    """Members of F̌ whose vertices are all strictly positive on the cell."""
    if len(sigma) != len(lifted.pool):
        raise DimensionMismatchError(
            f"sign vector has {len(sigma)} entries for a pool of {len(lifted.pool)}"
        )
    if cells is not None:
        realized = sigma in cells.covectors
    else:
        realized = realize_sign_vector(sigma, lifted.pool, lifted.n) is not None
    if not realized:
        raise InvalidInstanceError(f"sign vector {format_signs(sigma)} is not realized")
    return frozenset(
        label
        for label, (start, stop) in lifted.spans.items()
        if all(s == 1 for s in sigma[start:stop])
    )


def transversal_covectors(polys: Sequence[Polytope], n: int) -> list[SignVector]:
    """Covectors on which every polytope has a vertex of sign <= 0 and one of sign >= 0.

    Zero vertices lie on every central hyperplane and are left out of the pool; their
    members are met by any normal. An empty pool admits every normal, reported as the
    single empty sign vector.
    """
    pool: list[Point] = []
    groups: list[tuple[int, int]] = []
    for polytope in polys:
        check_dimension(polytope.vertices, n)
        if any(is_zero(v) for v in polytope.vertices):
            continue
        start = len(pool)
        pool.extend(polytope.vertices)
        groups.append((start, len(pool)))
    if not pool:
        return [()]
    complex_ = enumerate_covectors(pool, n, max_vertices=len(pool), max_dimension=n)
    return [
        sigma
        for sigma in complex_.covectors
        if all(min(sigma[a:b]) <= 0 <= max(sigma[a:b]) for a, b in groups)
    ]
