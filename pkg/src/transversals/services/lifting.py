"""Linearization: lift a family to height ±1 and double it with reflections."""

from __future__ import annotations

import random
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any

import structlog

from transversals.config import get_settings
from transversals.errors import InvalidInstanceError, InvariantError, MatroidError
from transversals.services.geometry import (
    Point,
    Polytope,
    is_zero,
    negate,
    origin_in_hull,
    point_sets_intersect,
)
from transversals.services.matroids import DoubledMatroid, Label, RankOracle

logger = structlog.get_logger()

REFLECTION_PREFIX = "-"


def reflection_id(label: Label) -> Label:
    return f"{REFLECTION_PREFIX}{label}"


@dataclass(frozen=True, eq=False)
class Instance:
    """A theorem instance (d, k, F, μ, φ) with validated invariants."""

    d: int
    k: int
    family: tuple[Polytope, ...]
    matroid: RankOracle
    phi: Mapping[Label, Point]
    meta: Mapping[str, Any] = field(default_factory=dict)
    _by_id: dict[Label, Polytope] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not 0 <= self.k < self.d:
            raise InvalidInstanceError(f"need 0 <= k < d, got k={self.k}, d={self.d}", "k")
        by_id: dict[Label, Polytope] = {}
        for index, member in enumerate(self.family):
            if member.id in by_id:
                raise InvalidInstanceError(f"duplicate id {member.id!r}", f"sets[{index}].id")
            if member.id.startswith(REFLECTION_PREFIX):
                raise InvalidInstanceError(
                    f"id {member.id!r} uses the reserved prefix {REFLECTION_PREFIX!r}",
                    f"sets[{index}].id",
                )
            if member.dim != self.d:
                raise InvalidInstanceError(
                    f"vertices of {member.id!r} have dimension {member.dim}, expected {self.d}",
                    f"sets[{index}].vertices",
                )
            by_id[member.id] = member
        object.__setattr__(self, "_by_id", by_id)

        phi = {label: tuple(Fraction(x) for x in image) for label, image in self.phi.items()}
        if set(phi) != set(by_id):
            missing = sorted(set(by_id) - set(phi))
            extra = sorted(set(phi) - set(by_id))
            raise InvalidInstanceError(f"phi keys do not match ids (missing {missing}, extra {extra})", "phi")
        for label, image in phi.items():
            if len(image) != self.k:
                raise InvalidInstanceError(
                    f"phi image of {label!r} has dimension {len(image)}, expected {self.k}",
                    f"phi.{label}",
                )
        object.__setattr__(self, "phi", {m.id: phi[m.id] for m in self.family})

        if set(self.matroid.ground) != set(by_id):
            raise InvalidInstanceError("matroid ground set does not match the family ids", "matroid")
        try:
            self.matroid.ensure_loopless()
        except MatroidError as exc:
            raise InvalidInstanceError(str(exc), "matroid")

    @property
    def ids(self) -> tuple[Label, ...]:
        return tuple(m.id for m in self.family)

    def member(self, label: Label) -> Polytope:
        try:
            return self._by_id[label]
        except KeyError:
            raise InvalidInstanceError(f"unknown id {label!r}")

    def vertices_of(self, labels: Iterable[Label]) -> list[Point]:
        """Merged vertex list of a sub-collection."""
        return [v for label in labels for v in self.member(label).vertices]

    def phi_of(self, labels: Iterable[Label]) -> list[Point]:
        return [self.phi[label] for label in labels]


@dataclass(frozen=True, eq=False)
class LiftedInstance:
    """The linearized double F̌ = F ∪ (−F) in R^{d+1} with μ̌ and equivariant φ̌."""

    source: Instance
    family: tuple[Polytope, ...]
    pairing: Mapping[Label, Label]
    matroid: DoubledMatroid
    phihat: Mapping[Label, Point]
    pool: tuple[Point, ...]
    spans: Mapping[Label, tuple[int, int]]
    _by_id: dict[Label, Polytope] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_by_id", {m.id: m for m in self.family})

    @property
    def n(self) -> int:
        return self.source.d + 1

    @property
    def k(self) -> int:
        return self.source.k

    @property
    def ids(self) -> tuple[Label, ...]:
        return tuple(m.id for m in self.family)

    def member(self, label: Label) -> Polytope:
        return self._by_id[label]

    def vertices_of(self, labels: Iterable[Label]) -> list[Point]:
        return [v for label in labels for v in self._by_id[label].vertices]

    def reflect(self, labels: Iterable[Label]) -> frozenset[Label]:
        return frozenset(self.pairing[label] for label in labels)


def lift_instance(inst: Instance) -> LiftedInstance:
    """Place F at height 1 in R^{d+1}, add reflections and extend μ and φ."""
    positives = [member.lifted(1) for member in inst.family]
    reflections = {member.id: reflection_id(member.id) for member in inst.family}
    negatives = [p.negated(reflections[p.id]) for p in positives]
    family = tuple(positives + negatives)

    ids = [m.id for m in family]
    if len(set(ids)) != len(ids):
        raise InvalidInstanceError("reflection ids collide with family ids")

    pairing: dict[Label, Label] = {}
    for original, reflected in reflections.items():
        pairing[original] = reflected
        pairing[reflected] = original

    phihat: dict[Label, Point] = {}
    for member in inst.family:
        image = inst.phi[member.id] + (Fraction(1),)
        phihat[member.id] = image
        phihat[reflections[member.id]] = negate(image)

    pool: list[Point] = []
    spans: dict[Label, tuple[int, int]] = {}
    for member in family:
        start = len(pool)
        pool.extend(member.vertices)
        spans[member.id] = (start, len(pool))
    if any(is_zero(v) for v in pool):
        raise InvariantError("lifted vertex pool contains the zero vector")

    logger.debug("Lifted instance", members=len(family), pool=len(pool), n=inst.d + 1)
    return LiftedInstance(
        source=inst,
        family=family,
        pairing=pairing,
        matroid=DoubledMatroid(inst.matroid, reflections),
        phihat=phihat,
        pool=tuple(pool),
        spans=spans,
    )


@dataclass(frozen=True)
class EquivalenceAudit:
    """Result of checking A ∩ B = ∅ ⟺ 0 ∉ conv(A ∪ −B) on lifted sub-collections."""

    passed: bool
    pairs_checked: int
    counterexample: tuple[tuple[Label, ...], tuple[Label, ...]] | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "pairs_checked": self.pairs_checked,
            "counterexample": [list(side) for side in self.counterexample]
            if self.counterexample
            else None,
        }


def _nonempty_subsets(labels: tuple[Label, ...]) -> list[tuple[Label, ...]]:
    return [c for size in range(1, len(labels) + 1) for c in combinations(labels, size)]


def disjointness_equivalence_audit(
    inst: Instance,
    trials: int | None = None,
    seed: int = 0,
    exhaustive_limit: int = 4,
) -> EquivalenceAudit:
    """Self-test of the geometry kernel against the linearized disjointness criterion.

    All pairs of nonempty sub-collections are checked when |F| <= exhaustive_limit,
    otherwise ``trials`` random pairs drawn with a seeded generator.
    """
    lifted = lift_instance(inst)
    labels = inst.ids
    n = lifted.n
    if not labels:
        return EquivalenceAudit(True, 0)

    if len(labels) <= exhaustive_limit:
        subsets = _nonempty_subsets(labels)
        pairs = [(a, b) for a in subsets for b in subsets]
    else:
        count = get_settings().equivalence_trials if trials is None else trials
        rng = random.Random(seed)
        pairs = []
        for _ in range(count):
            a = tuple(sorted(rng.sample(labels, rng.randint(1, len(labels)))))
            b = tuple(sorted(rng.sample(labels, rng.randint(1, len(labels)))))
            pairs.append((a, b))

    for a, b in pairs:
        first = lifted.vertices_of(a)
        second = lifted.vertices_of(b)
        meet = point_sets_intersect(first, second, n)
        covers = origin_in_hull(first + [negate(v) for v in second], n)
        if meet != covers:
            logger.error("Disjointness equivalence failed", first=a, second=b)
            return EquivalenceAudit(False, len(pairs), (a, b))
    return EquivalenceAudit(True, len(pairs))
