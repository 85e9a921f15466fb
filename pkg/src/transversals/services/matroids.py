"""Matroid rank oracles over families of polytope labels."""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, ClassVar

import structlog

from transversals.config import get_settings
from transversals.errors import CapExceededError, MatroidError
from transversals.services.geometry import Point, format_rational, rank_of_vectors

logger = structlog.get_logger()

Label = str
LabelSet = frozenset[Label]


class RankOracle(ABC):
    """Rank function of a matroid on an ordered ground set of labels.

    Oracles are immutable after construction; answers are memoized per subset.
    """

    kind: ClassVar[str]

    def __init__(self, ground: Iterable[Label]):
        self.ground: tuple[Label, ...] = tuple(ground)
        self._ground_set: LabelSet = frozenset(self.ground)
        if len(self._ground_set) != len(self.ground):
            raise MatroidError("ground set contains duplicate labels")
        self._position = {label: i for i, label in enumerate(self.ground)}
        self._cache: dict[LabelSet, int] = {}

    def rank(self, subset: Iterable[Label]) -> int:
        """Rank of a subset of the ground set."""
        key = frozenset(subset)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        unknown = key - self._ground_set
        if unknown:
            raise MatroidError(f"labels not in ground set: {sorted(unknown)}")
        value = self._rank(key)
        self._cache[key] = value
        return value

    def is_independent(self, subset: Iterable[Label]) -> bool:
        key = frozenset(subset)
        return self.rank(key) == len(key)

    def closure(self, subset: Iterable[Label]) -> LabelSet:
        """All ground elements whose addition leaves the rank unchanged."""
        key = frozenset(subset)
        base = self.rank(key)
        return frozenset(x for x in self.ground if x in key or self.rank(key | {x}) == base)

    def full_rank(self) -> int:
        return self.rank(self.ground)

    def loops(self) -> list[Label]:
        return [x for x in self.ground if self.rank({x}) == 0]

    def ensure_loopless(self) -> None:
        """Reject oracles with loops; the theorem assumes loopless matroids."""
        loops = self.loops()
        if loops:
            raise MatroidError(f"matroid has loops: {loops}")

    def ordered(self, subset: Iterable[Label]) -> tuple[Label, ...]:
        """Subset listed in ground order."""
        return tuple(sorted(subset, key=self._position.__getitem__))

    @abstractmethod
    def _rank(self, subset: LabelSet) -> int: ...

    @abstractmethod
    def to_spec(self) -> dict[str, Any]:
        """Wire form of the oracle (see the instance file grammar)."""


class PartitionMatroid(RankOracle):
    """Rank = number of color classes met by the subset."""

    kind = "partition"

    def __init__(self, classes: Mapping[Label, int]):
        super().__init__(classes.keys())
        self.classes = dict(classes)

    def _rank(self, subset: LabelSet) -> int:
        return len({self.classes[x] for x in subset})

    def class_members(self) -> dict[int, tuple[Label, ...]]:
        """Color classes keyed by class index, members in ground order."""
        members: dict[int, list[Label]] = {}
        for label in self.ground:
            members.setdefault(self.classes[label], []).append(label)
        return {index: tuple(members[index]) for index in sorted(members)}

    def to_spec(self) -> dict[str, Any]:
        return {"type": self.kind, "classes": dict(self.classes)}


class UniformMatroid(RankOracle):
    """Rank = min(|S|, r)."""

    kind = "uniform"

    def __init__(self, ground: Iterable[Label], r: int):
        super().__init__(ground)
        if r < 0:
            raise MatroidError(f"uniform matroid rank must be nonnegative, got {r}")
        self.r = r

    def _rank(self, subset: LabelSet) -> int:
        return min(len(subset), self.r)

    def to_spec(self) -> dict[str, Any]:
        return {"type": self.kind, "rank": self.r}


class LinearMatroid(RankOracle):
    """Rank of the represented column vectors over the rationals."""

    kind = "linear"

    def __init__(self, columns: Mapping[Label, Point]):
        super().__init__(columns.keys())
        self.columns = {label: tuple(vector) for label, vector in columns.items()}
        dims = {len(v) for v in self.columns.values()}
        if len(dims) > 1:
            raise MatroidError(f"linear matroid columns mix dimensions {sorted(dims)}")
        self.dimension = dims.pop() if dims else 0

    def _rank(self, subset: LabelSet) -> int:
        return rank_of_vectors([self.columns[x] for x in self.ordered(subset)], self.dimension)

    def to_spec(self) -> dict[str, Any]:
        return {
            "type": self.kind,
            "columns": {x: [format_rational(c) for c in v] for x, v in self.columns.items()},
        }


class ExplicitBasesMatroid(RankOracle):
    """Rank = max over bases B of |S ∩ B|."""

    kind = "explicit_bases"

    def __init__(self, ground: Iterable[Label], bases: Iterable[Iterable[Label]]):
        super().__init__(ground)
        self.bases = tuple(frozenset(b) for b in bases)
        if not self.bases:
            raise MatroidError("explicit_bases needs at least one basis")
        sizes = {len(b) for b in self.bases}
        if len(sizes) != 1:
            raise MatroidError(f"bases must have equal size, got sizes {sorted(sizes)}")
        for b in self.bases:
            if not b <= self._ground_set:
                raise MatroidError(f"basis uses labels outside the ground set: {sorted(b)}")

    def _rank(self, subset: LabelSet) -> int:
        return max(len(subset & b) for b in self.bases)

    def to_spec(self) -> dict[str, Any]:
        return {"type": self.kind, "bases": [list(self.ordered(b)) for b in self.bases]}


class DoubledMatroid(RankOracle):
    """Parallel extension of a base matroid: every member gets a parallel reflection.

    The rank of G is the base rank of G̃, the set of originals present in G
    directly or through their reflection.
    """

    kind = "doubled"

    def __init__(self, base: RankOracle, reflections: Mapping[Label, Label]):
        missing = set(base.ground) - set(reflections)
        if missing:
            raise MatroidError(f"no reflection given for {sorted(missing)}")
        super().__init__(tuple(base.ground) + tuple(reflections[x] for x in base.ground))
        self.base = base
        self.partner: dict[Label, Label] = {}
        self._original: dict[Label, Label] = {}
        for original in base.ground:
            reflected = reflections[original]
            self.partner[original] = reflected
            self.partner[reflected] = original
            self._original[original] = original
            self._original[reflected] = original

    def tilde(self, subset: Iterable[Label]) -> LabelSet:
        """Originals represented in the subset."""
        return frozenset(self._original[x] for x in subset)

    def negate(self, subset: Iterable[Label]) -> LabelSet:
        return frozenset(self.partner[x] for x in subset)

    def _rank(self, subset: LabelSet) -> int:
        return self.base.rank(self.tilde(subset))

    def to_spec(self) -> dict[str, Any]:
        return {"type": self.kind, "base": self.base.to_spec()}


# Flats -------------------------------------------------------------------------------------


@dataclass(frozen=True)
class Flat:
    """A closed set together with its rank."""

    members: LabelSet
    rank: int


def enumerate_low_rank_flats(oracle: RankOracle, r: int) -> list[Flat]:
    """All flats of rank <= r, as closures of subsets with at most r elements.

    Complete because a flat of rank ρ is the closure of any ρ independent members.
    Sorted by rank, then by ground order of the members.
    """
    if r < 0:
        raise MatroidError(f"flat rank bound must be nonnegative, got {r}")
    found: dict[LabelSet, int] = {}
    for size in range(min(r, len(oracle.ground)) + 1):
        for subset in combinations(oracle.ground, size):
            flat = oracle.closure(subset)
            if flat not in found:
                found[flat] = oracle.rank(flat)
    position = {label: i for i, label in enumerate(oracle.ground)}
    flats = [Flat(members, rank) for members, rank in found.items() if rank <= r]
    flats.sort(key=lambda f: (f.rank, sorted(position[x] for x in f.members)))
    return flats


# Axioms ------------------------------------------------------------------------------------


@dataclass(frozen=True)
class AxiomReport:
    """Outcome of an exhaustive rank-axiom check."""

    passed: bool
    axiom: str | None = None
    witness: tuple[LabelSet, ...] = field(default_factory=tuple)
    detail: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "axiom": self.axiom,
            "witness": [sorted(w) for w in self.witness],
            "detail": self.detail,
        }


def _subsets(ground: tuple[Label, ...]) -> Iterator[LabelSet]:
    for size in range(len(ground) + 1):
        for subset in combinations(ground, size):
            yield frozenset(subset)


def verify_rank_axioms(oracle: RankOracle, max_ground: int | None = None) -> AxiomReport:
    """Exhaustively check normalization, cardinality bound, looplessness, unit increase,
    monotonicity and submodularity. Reports the first violation with witness subsets.
    """
    cap = get_settings().max_axiom_ground if max_ground is None else max_ground
    if len(oracle.ground) > cap:
        raise CapExceededError(
            "ground set size", len(oracle.ground), cap, "TRANSVERSALS_MAX_AXIOM_GROUND"
        )

    empty: LabelSet = frozenset()
    if oracle.rank(empty) != 0:
        return AxiomReport(False, "normalization", (empty,), "rank of the empty set is not 0")

    subsets = list(_subsets(oracle.ground))
    for s in subsets:
        value = oracle.rank(s)
        if not 0 <= value <= len(s):
            return AxiomReport(False, "cardinality", (s,), f"rank {value} outside [0, {len(s)}]")

    for x in oracle.ground:
        if oracle.rank({x}) != 1:
            return AxiomReport(False, "loopless", (frozenset({x}),), f"{x!r} is a loop")

    for s in subsets:
        base = oracle.rank(s)
        outside = [x for x in oracle.ground if x not in s]
        for x in outside:
            grown = oracle.rank(s | {x})
            if grown < base:
                return AxiomReport(False, "monotonicity", (s, s | {x}), "rank decreased")
            if grown > base + 1:
                return AxiomReport(False, "unit_increase", (s, s | {x}), "rank grew by more than 1")
        for x, y in combinations(outside, 2):
            lhs = oracle.rank(s | {x}) + oracle.rank(s | {y})
            rhs = oracle.rank(s | {x, y}) + base
            if lhs < rhs:
                return AxiomReport(
                    False, "submodularity", (s | {x}, s | {y}), "rank(S∪T) + rank(S∩T) exceeds rank(S) + rank(T)"
                )

    logger.debug("Rank axioms verified", kind=oracle.kind, ground=len(oracle.ground))
    return AxiomReport(True)
