"""Simplicial complexes K and L from the proof, with GF(2) reduced homology.

Vanishing reduced homology through degree k is a necessary condition for
k-connectedness, so a nonzero Betti number refutes a connectivity claim while a zero
vector only supports it.
"""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Mapping
from dataclasses import dataclass, field
from itertools import combinations

import structlog

from transversals.config import get_settings
from transversals.errors import CapExceededError, ComplexError, InvariantError
from transversals.services.geometry import origin_in_hull
from transversals.services.lifting import LiftedInstance
from transversals.services.transversal import Cell, CellComplex

logger = structlog.get_logger()

Face = frozenset[Hashable]
BettiVector = tuple[int, ...]


def _face_cap(max_faces: int | None) -> int:
    return get_settings().max_faces if max_faces is None else max_faces


def open_face(faces: Iterable[Face]) -> Face | None:
    """A face missing one of its codimension-one subfaces, or None if closed."""
    present = set(faces)
    for face in present:
        if len(face) > 1 and any(face - {v} not in present for v in face):
            return face
    return None


@dataclass(frozen=True, eq=False)
class SimplicialComplex:
    """A downward-closed family of nonempty faces over an ordered vertex list.

    The empty face is implicit. ``z2`` is an optional involution on the vertices.
    """

    vertices: tuple[Hashable, ...]
    faces: frozenset[Face]
    z2: Mapping[Hashable, Hashable] | None = None
    _position: dict[Hashable, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_position", {v: i for i, v in enumerate(self.vertices)})
        known = set(self.vertices)
        for face in self.faces:
            if not face:
                raise ComplexError("the empty face is implicit and must not be listed")
            if not face <= known:
                raise ComplexError(f"face uses unknown vertices: {sorted(map(str, face - known))}")
        if open_face(self.faces) is not None:
            raise ComplexError("face family is not downward closed")
        if self.z2 is not None:
            for vertex in self.vertices:
                image = self.z2.get(vertex)
                if image not in known or self.z2.get(image) != vertex:
                    raise ComplexError("z2 is not an involution on the vertex set")

    @classmethod
    def from_facets(
        cls,
        vertices: Iterable[Hashable],
        facets: Iterable[Iterable[Hashable]],
        z2: Mapping[Hashable, Hashable] | None = None,
    ) -> SimplicialComplex:
        """Close a list of maximal faces downward."""
        faces: set[Face] = set()
        for facet in facets:
            members = tuple(facet)
            for size in range(1, len(members) + 1):
                faces.update(frozenset(c) for c in combinations(members, size))
        return cls(tuple(vertices), frozenset(faces), z2)

    @property
    def dimension(self) -> int:
        return max((len(f) for f in self.faces), default=0) - 1

    @property
    def facets(self) -> list[Face]:
        """Maximal faces, in canonical order."""
        maximal = [f for f in self.faces if not any(f < g for g in self.faces if len(g) == len(f) + 1)]
        return sorted(maximal, key=self.face_key)

    def face_key(self, face: Face) -> tuple[int, ...]:
        return tuple(sorted(self._position[v] for v in face))

    def faces_of_dim(self, i: int) -> list[Face]:
        return sorted((f for f in self.faces if len(f) == i + 1), key=self.face_key)


def build_K(lifted: LiftedInstance, *, max_faces: int | None = None) -> SimplicialComplex:
    """Faces: subfamilies G of F̌ that are μ̌-independent with 0 ∉ conv G."""
    cap = _face_cap(max_faces)
    labels = lifted.ids
    order = {label: i for i, label in enumerate(labels)}

    def is_face(members: frozenset[str]) -> bool:
        return lifted.matroid.is_independent(members) and not origin_in_hull(
            lifted.vertices_of(lifted.matroid.ordered(members)), lifted.n
        )

    faces: set[Face] = set()
    level = [frozenset({x}) for x in labels if is_face(frozenset({x}))]
    while level:
        faces.update(level)
        if len(faces) > cap:
            raise CapExceededError("complex size", len(faces), cap, "TRANSVERSALS_MAX_FACES")
        grown = []
        for face in level:
            last = max(order[x] for x in face)
            for label in labels[last + 1:]:
                candidate = face | {label}
                if is_face(candidate):
                    grown.append(candidate)
        level = grown

    try:
        complex_ = SimplicialComplex(labels, frozenset(faces), dict(lifted.pairing))
    except ComplexError as exc:
        raise InvariantError(f"K failed its construction checks: {exc}")
    logger.debug("Built K", vertices=len(labels), faces=len(faces), dimension=complex_.dimension)
    return complex_


def induced(complex_: SimplicialComplex, subset: Iterable[Hashable]) -> SimplicialComplex:
    """The induced subcomplex K[W]."""
    chosen = set(subset)
    unknown = chosen - set(complex_.vertices)
    if unknown:
        raise ComplexError(f"unknown vertices: {sorted(map(str, unknown))}")
    vertices = tuple(v for v in complex_.vertices if v in chosen)
    faces = frozenset(f for f in complex_.faces if f <= chosen)
    z2 = None
    if complex_.z2 is not None and all(complex_.z2[v] in chosen for v in vertices):
        z2 = {v: complex_.z2[v] for v in vertices}
    return SimplicialComplex(vertices, faces, z2)


def barycentric_skeleton(
    cells: CellComplex, m: int, *, max_faces: int | None = None
) -> SimplicialComplex:
    """Chains of cells with strictly increasing dimension, at most m+1 cells long."""
    if m < 0:
        raise ComplexError(f"skeleton dimension must be nonnegative, got {m}")
    cap = _face_cap(max_faces)
    vertices = cells.cells
    above: dict[Cell, list[Cell]] = {
        c: [d for d in vertices if d.dim > c.dim and c.is_face_of(d)] for c in vertices
    }

    faces: set[Face] = set()
    stack: list[tuple[Cell, ...]] = [(c,) for c in vertices]
    while stack:
        chain = stack.pop()
        faces.add(frozenset(chain))
        if len(faces) > cap:
            raise CapExceededError("complex size", len(faces), cap, "TRANSVERSALS_MAX_FACES")
        if len(chain) <= m:
            stack.extend(chain + (d,) for d in above[chain[-1]])

    z2 = {c: -c for c in vertices}
    logger.debug("Built barycentric skeleton", vertices=len(vertices), faces=len(faces), m=m)
    return SimplicialComplex(vertices, frozenset(faces), z2)


def _gf2_rank(columns: Iterable[int]) -> int:
    # Column reduction keyed by the lowest pivot row, with columns as integer bitsets.
    pivots: dict[int, int] = {}
    rank = 0
    for column in columns:
        while column:
            low = column.bit_length() - 1
            if low not in pivots:
                pivots[low] = column
                rank += 1
                break
            column ^= pivots[low]
    return rank


def reduced_betti_gf2(
    complex_: SimplicialComplex, up_to: int, *, max_faces: int | None = None
) -> BettiVector:
    """Reduced Betti numbers over GF(2) in degrees 0..up_to.

    The boundary of a vertex is the augmentation to the empty face.
    """
    cap = _face_cap(max_faces)
    if len(complex_.faces) > cap:
        raise CapExceededError("complex size", len(complex_.faces), cap, "TRANSVERSALS_MAX_FACES")
    if up_to < 0:
        return ()

    by_dim = {i: complex_.faces_of_dim(i) for i in range(up_to + 2)}
    index = {i: {face: j for j, face in enumerate(faces)} for i, faces in by_dim.items()}

    def boundary_rank(i: int) -> int:
        if i == 0:
            return 1 if by_dim[0] else 0
        rows = index[i - 1]
        columns = []
        for face in by_dim[i]:
            bits = 0
            for vertex in face:
                bits |= 1 << rows[face - {vertex}]
            columns.append(bits)
        return _gf2_rank(columns)

    ranks = [boundary_rank(i) for i in range(up_to + 2)]
    return tuple(len(by_dim[i]) - ranks[i] - ranks[i + 1] for i in range(up_to + 1))


def check_free_z2(complex_: SimplicialComplex) -> bool:
    """True iff the involution maps faces to faces and fixes no nonempty face."""
    if complex_.z2 is None:
        raise ComplexError("complex carries no involution")
    for face in complex_.faces:
        image = frozenset(complex_.z2[v] for v in face)
        if image == face or image not in complex_.faces:
            return False
    return True


def euler_characteristic_cells(cells: CellComplex) -> int:
    """Alternating count of cells, with lineality spheres instantiated."""
    return sum((-1) ** c.dim for c in cells.cells)
