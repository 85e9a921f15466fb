"""Decide the theorem's hypothesis (∗) and its linearized form (∗̌)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from itertools import combinations, product
from typing import Any

import structlog

from transversals.config import get_settings
from transversals.errors import CapExceededError
from transversals.services.geometry import origin_in_hull, point_sets_intersect
from transversals.services.lifting import Instance, LiftedInstance
from transversals.services.matroids import Label, RankOracle
from transversals.tasks import ShardedTask
from transversals.utils.metrics import STAR_PAIRS

logger = structlog.get_logger()


@dataclass(frozen=True)
class StarViolation:
    """Disjoint, jointly independent G1, G2 whose hulls are disjoint but φ-hulls meet."""

    g1: tuple[Label, ...]
    g2: tuple[Label, ...]
    detail: str = "hulls are disjoint in R^d but the phi-hulls intersect in R^k"

    def to_dict(self) -> dict[str, Any]:
        return {"G1": list(self.g1), "G2": list(self.g2), "detail": self.detail}


@dataclass(frozen=True)
class LiftedStarViolation:
    """Independent G ⊆ F̌ with 0 ∉ conv G but 0 ∈ conv φ̌(G)."""

    members: tuple[Label, ...]
    detail: str = "origin avoids conv G but lies in conv phihat(G)"

    def to_dict(self) -> dict[str, Any]:
        return {"G": list(self.members), "detail": self.detail}


def _check_family_cap(size: int, max_family: int | None) -> None:
    cap = get_settings().max_family if max_family is None else max_family
    if size > cap:
        raise CapExceededError("family size", size, cap, "--max-family")


def _largest_independent(matroid: RankOracle, labels: tuple[Label, ...]) -> int:
    # No set larger than the full rank is independent.
    return min(len(labels), matroid.full_rank())


def _splits(union: tuple[Label, ...]) -> list[tuple[tuple[Label, ...], tuple[Label, ...]]]:
    # The condition is symmetric in (G1, G2): pin the first label to G1.
    head, rest = union[0], union[1:]
    splits = []
    for size in range(len(rest)):
        for extra in combinations(rest, size):
            g1 = (head, *extra)
            g2 = tuple(x for x in rest if x not in extra)
            splits.append((g1, g2))
    return splits


def _star_violation_in_union(inst: Instance, union: tuple[Label, ...]) -> StarViolation | None:
    for g1, g2 in _splits(union):
        STAR_PAIRS.labels(condition="star").inc()
        if not point_sets_intersect(inst.phi_of(g1), inst.phi_of(g2), inst.k):
            continue
        if not point_sets_intersect(inst.vertices_of(g1), inst.vertices_of(g2), inst.d):
            return StarViolation(g1, g2)
    return None


def check_star(
    inst: Instance, *, max_family: int | None = None, jobs: int | None = None
) -> StarViolation | None:
    """Check (∗) over all independent G1 ∪ G2; None means the hypothesis holds.

    Unions are visited by size, then lexicographically over sorted ids; the reported
    violation is the first in that order for any number of jobs.
    """
    _check_family_cap(len(inst.family), max_family)
    labels = tuple(sorted(inst.ids))
    unions = [
        union
        for size in range(2, _largest_independent(inst.matroid, labels) + 1)
        for union in combinations(labels, size)
        if inst.matroid.is_independent(union)
    ]
    task = ShardedTask("check_star", jobs)
    violation = task.first(partial(_star_violation_in_union, inst), unions)
    logger.info(
        "Hypothesis checked",
        condition="star",
        unions=len(unions),
        violated=violation is not None,
    )
    return violation


def _lifted_violation_for_support(
    lifted: LiftedInstance, support: tuple[Label, ...]
) -> LiftedStarViolation | None:
    for signs in product((1, -1), repeat=len(support)):
        members = tuple(x if s == 1 else lifted.pairing[x] for x, s in zip(support, signs, strict=True))
        STAR_PAIRS.labels(condition="star_lifted").inc()
        if not origin_in_hull([lifted.phihat[x] for x in members], lifted.k + 1):
            continue
        if not origin_in_hull(lifted.vertices_of(members), lifted.n):
            return LiftedStarViolation(members)
    return None


def check_star_lifted(
    lifted: LiftedInstance, *, max_family: int | None = None, jobs: int | None = None
) -> LiftedStarViolation | None:
    """Check (∗̌) over all nonempty independent G ⊆ F̌; None means it holds.

    Independent sets never contain a pair {P, −P}, so G is determined by its support
    G̃ ⊆ F and one sign per member.
    """
    _check_family_cap(len(lifted.source.family), max_family)
    labels = tuple(sorted(lifted.source.ids))
    supports = [
        support
        for size in range(1, _largest_independent(lifted.source.matroid, labels) + 1)
        for support in combinations(labels, size)
        if lifted.source.matroid.is_independent(support)
    ]
    task = ShardedTask("check_star_lifted", jobs)
    violation = task.first(partial(_lifted_violation_for_support, lifted), supports)
    logger.info(
        "Hypothesis checked",
        condition="star_lifted",
        supports=len(supports),
        violated=violation is not None,
    )
    return violation
