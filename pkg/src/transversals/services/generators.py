"""Seeded generators of instances that satisfy the hypothesis (∗)."""

from __future__ import annotations

import random
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import product
from typing import Any

import structlog

from transversals.config import get_settings
from transversals.errors import InvalidInstanceError, InvariantError
from transversals.models.instance import matroid_from_dict
from transversals.services.geometry import Point, Polytope, add, format_rational, scale
from transversals.services.hypothesis import check_star
from transversals.services.lifting import Instance
from transversals.services.verifier import replicate_classic
from transversals.utils.metrics import GENERATOR_ATTEMPTS

logger = structlog.get_logger()

HADWIGER_SPACING = 3


def _guard(inst: Instance, generator: str, *, max_family: int | None = None) -> None:
    violation = check_star(inst, max_family=max_family)
    if violation is not None:
        raise InvariantError(f"{generator} generator produced an instance violating (∗): {violation}")


def gen_product(
    points: Sequence[Sequence[Fraction | int | str]],
    d: int,
    box_side: Fraction | int | str = 1,
    matroid: Mapping[str, Any] | None = None,
    seed: int = 0,
    *,
    k: int | None = None,
) -> Instance:
    """Fibers {x_i} × [0, s]^(d−k) over distinct points x_i of R^k, with φ(P_i) = x_i.

    conv of a union of fibers is conv{x_i} × [0, s]^(d−k), so hull disjointness in R^d
    matches φ-hull disjointness in R^k for every pair of subfamilies.
    """
    base = [tuple(Fraction(c) for c in p) for p in points]
    if k is None:
        if not base:
            raise InvalidInstanceError("k is required when no points are given", "points")
        k = len(base[0])
    if any(len(p) != k for p in base):
        raise InvalidInstanceError(f"every point must have dimension k={k}", "points")
    if len(set(base)) != len(base):
        raise InvalidInstanceError("points must be distinct", "points")
    side = Fraction(box_side)
    if side <= 0:
        raise InvalidInstanceError("box side must be positive", "box")
    if not 0 <= k < d:
        raise InvalidInstanceError(f"need 0 <= k < d, got k={k}, d={d}", "k")

    corners = list(product((Fraction(0), side), repeat=d - k))
    ids = [f"P{i + 1}" for i in range(len(base))]
    family = tuple(
        Polytope(label, tuple(x + corner for corner in corners))
        for label, x in zip(ids, base, strict=True)
    )
    spec = dict(matroid) if matroid is not None else {"type": "uniform", "rank": k + 2}
    inst = Instance(
        d=d,
        k=k,
        family=family,
        matroid=matroid_from_dict(spec, ids),
        phi=dict(zip(ids, base, strict=True)),
        meta={"generator": "product", "seed": seed},
    )
    _guard(inst, "product")
    GENERATOR_ATTEMPTS.labels(generator="product", outcome="accepted").inc()
    return inst


@dataclass(frozen=True)
class RandomParams:
    """Shape of a random instance."""

    d: int
    k: int
    members: int
    max_vertices_per_set: int = 3
    coordinate_range: tuple[int, int] = (-3, 3)
    max_denominator: int = 1
    matroid: Mapping[str, Any] | None = None

    def __post_init__(self) -> None:
        if not 0 <= self.k < self.d:
            raise InvalidInstanceError(f"need 0 <= k < d, got k={self.k}, d={self.d}", "k")
        if self.members < 0 or self.max_vertices_per_set < 1 or self.max_denominator < 1:
            raise InvalidInstanceError("member, vertex and denominator counts must be positive")
        low, high = self.coordinate_range
        if low > high:
            raise InvalidInstanceError(f"empty coordinate range {low}..{high}", "range")


def _random_rational(rng: random.Random, params: RandomParams) -> Fraction:
    low, high = params.coordinate_range
    denominator = rng.randint(1, params.max_denominator)
    return Fraction(rng.randint(low * denominator, high * denominator), denominator)


def gen_random_filtered(params: RandomParams, seed: int) -> Instance | None:
    """A random instance if it satisfies (∗), else None. Pure function of (params, seed)."""
    cap = get_settings().max_family
    if params.members > cap:
        raise InvalidInstanceError(f"{params.members} members exceed the family cap {cap}", "members")
    rng = random.Random(seed)
    family = []
    phi: dict[str, Point] = {}
    for i in range(params.members):
        label = f"R{i + 1}"
        count = rng.randint(1, params.max_vertices_per_set)
        vertices = tuple(
            tuple(_random_rational(rng, params) for _ in range(params.d)) for _ in range(count)
        )
        family.append(Polytope(label, vertices))
        phi[label] = tuple(_random_rational(rng, params) for _ in range(params.k))

    ids = [m.id for m in family]
    spec = dict(params.matroid) if params.matroid is not None else {"type": "uniform", "rank": params.k + 2}
    inst = Instance(
        d=params.d,
        k=params.k,
        family=tuple(family),
        matroid=matroid_from_dict(spec, ids),
        phi=phi,
        meta={"generator": "random", "seed": seed},
    )
    if check_star(inst) is not None:
        GENERATOR_ATTEMPTS.labels(generator="random", outcome="rejected").inc()
        return None
    GENERATOR_ATTEMPTS.labels(generator="random", outcome="accepted").inc()
    return inst


@dataclass(frozen=True)
class SampleBatch:
    instances: tuple[Instance, ...]
    tried: int
    seeds: tuple[int, ...] = field(default_factory=tuple)

    @property
    def accepted(self) -> int:
        return len(self.instances)

    def stats(self) -> dict[str, int]:
        return {"accepted": self.accepted, "tried": self.tried}


def sample_filtered(params: RandomParams, seed: int, attempts: int = 100, count: int = 1) -> SampleBatch:
    """Retry gen_random_filtered on derived seeds until ``count`` instances pass."""
    rng = random.Random(seed)
    accepted: list[Instance] = []
    seeds: list[int] = []
    tried = 0
    while tried < attempts and len(accepted) < count:
        derived = rng.getrandbits(32)
        tried += 1
        inst = gen_random_filtered(params, derived)
        if inst is not None:
            meta = {**inst.meta, "sample_seed": seed, "tried": tried}
            accepted.append(replace(inst, meta=meta))
            seeds.append(derived)
    logger.info("Random sampling finished", accepted=len(accepted), tried=tried)
    return SampleBatch(tuple(accepted), tried, tuple(seeds))


def _small_offset(rng: random.Random) -> Point:
    return (Fraction(rng.randint(-4, 4), 8), Fraction(rng.randint(-4, 4), 8))


def gen_hadwiger(n: int, seed: int) -> Instance:
    """n disjoint triangles strung along a common line, replicated into 3 color classes.

    Each triangle contains its anchor on the line; anchors are spaced so the triangles
    are pairwise disjoint and φ is the order of the anchors along the line.
    """
    if n < 1:
        raise InvalidInstanceError(f"need at least one member, got {n}", "count")
    rng = random.Random(seed)
    direction: Point = (Fraction(rng.randint(1, 3)), Fraction(rng.randint(-3, 3)))
    origin: Point = (Fraction(rng.randint(-2, 2)), Fraction(rng.randint(-2, 2)))

    family = []
    anchors = []
    for i in range(n):
        anchor = add(origin, scale(direction, HADWIGER_SPACING * i))
        while True:
            e1, e2 = _small_offset(rng), _small_offset(rng)
            if e1[0] * e2[1] - e1[1] * e2[0] != 0:
                break
        vertices = (anchor, add(anchor, e1), add(anchor, e2))
        family.append(Polytope(f"T{i + 1}", vertices))
        anchors.append([format_rational(c) for c in anchor])

    phi = {m.id: (Fraction(i),) for i, m in enumerate(family)}
    meta = {"generator": "hadwiger", "seed": seed, "anchors": anchors}
    inst = replicate_classic(family, phi, k=1, d=2, meta=meta)
    # Rank 3: only unions of at most three members are enumerated.
    _guard(inst, "hadwiger", max_family=len(inst.family))
    GENERATOR_ATTEMPTS.labels(generator="hadwiger", outcome="accepted").inc()
    return inst
