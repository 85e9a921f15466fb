"""The headline pipeline: certify the hypothesis, then find the promised subfamily G.

The search space is complete: if G₀ has a transversal with μ(F \\ G₀) <= k+1, the flat
H = closure(F \\ G₀) has the same rank and F \\ H ⊆ G₀ inherits the transversal. So it
suffices to try the complements of all flats of rank <= k+1.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from functools import partial
from typing import Any, ClassVar

import structlog

from transversals.errors import (
    EXIT_HYPOTHESIS_FAILED,
    EXIT_OK,
    EXIT_THEOREM_VIOLATED,
    InvariantError,
    MatroidError,
)
from transversals.models.instance import instance_digest
from transversals.services.geometry import Point, Polytope
from transversals.services.hypothesis import StarViolation, check_star
from transversals.services.lifting import Instance
from transversals.services.matroids import Label, PartitionMatroid, enumerate_low_rank_flats
from transversals.services.transversal import Hyperplane, find_affine_transversal
from transversals.tasks import ShardedTask
from transversals.utils.metrics import VERIFICATIONS

logger = structlog.get_logger()


@dataclass(frozen=True)
class HypothesisFailed:
    violation: StarViolation

    status: ClassVar[str] = "hypothesis_failed"
    exit_code: ClassVar[int] = EXIT_HYPOTHESIS_FAILED

    def to_dict(self) -> dict[str, Any]:
        return {"status": self.status, "violation": self.violation.to_dict()}


@dataclass(frozen=True)
class Witness:
    """A subfamily G with μ(F \\ G) <= k+1 and a hyperplane meeting every member of G."""

    subfamily: tuple[Label, ...]
    complement_flat: tuple[Label, ...]
    complement_rank: int
    hyperplane: Hyperplane
    vacuous: bool = False
    flats_examined: int = 0

    status: ClassVar[str] = "witness"
    exit_code: ClassVar[int] = EXIT_OK

    @property
    def nonempty(self) -> bool:
        return bool(self.subfamily)

    def to_dict(self) -> dict[str, Any]:
        return {
            "status": self.status,
            "G": list(self.subfamily),
            "complement_flat": list(self.complement_flat),
            "complement_rank": self.complement_rank,
            "hyperplane": self.hyperplane.to_dict(),
            "vacuous": self.vacuous,
            "stats": {"flats_examined": self.flats_examined, "nonempty": self.nonempty},
        }


@dataclass(frozen=True)
class TheoremViolated:
    """No flat complement admitted a transversal. Reachable only through a bug."""

    digest: str
    flats_examined: int

    status: ClassVar[str] = "theorem_violated"
    exit_code: ClassVar[int] = EXIT_THEOREM_VIOLATED

    def to_dict(self) -> dict[str, Any]:
        return {"status": self.status, "digest": self.digest, "flats_examined": self.flats_examined}


VerificationResult = HypothesisFailed | Witness | TheoremViolated


def reverify_witness(inst: Instance, witness: Witness) -> None:
    """Recompute every claim of a witness; raise InvariantError on any mismatch."""
    subfamily = set(witness.subfamily)
    complement = set(witness.complement_flat)
    if subfamily & complement or subfamily | complement != set(inst.ids):
        raise InvariantError("witness does not split the family into G and its complement")
    rank = inst.matroid.rank(complement)
    if rank != witness.complement_rank or rank > inst.k + 1:
        raise InvariantError(f"complement rank {rank} does not satisfy the bound k+1={inst.k + 1}")
    for label in witness.subfamily:
        if not witness.hyperplane.meets(inst.member(label)):
            raise InvariantError(f"hyperplane misses member {label!r}")


def _attempt(inst: Instance, candidate: tuple[int, tuple[Label, ...]]) -> tuple[int, Hyperplane] | None:
    index, subfamily = candidate
    hyperplane = find_affine_transversal(inst, subfamily)
    return None if hyperplane is None else (index, hyperplane)


def _emit(inst: Instance, result: VerificationResult) -> VerificationResult:
    if isinstance(result, Witness):
        reverify_witness(inst, result)
    VERIFICATIONS.labels(status=result.status).inc()
    logger.info("Verification finished", status=result.status)
    return result


def verify_theorem(
    inst: Instance, *, max_family: int | None = None, jobs: int | None = None
) -> VerificationResult:
    """Run the hypothesis check, then search flat complements for a transversal.

    Candidates are tried largest G first, ties broken lexicographically on sorted ids,
    so the reported witness is the same for any number of jobs.
    """
    violation = check_star(inst, max_family=max_family, jobs=jobs)
    if violation is not None:
        return _emit(inst, HypothesisFailed(violation))

    matroid = inst.matroid
    total = matroid.full_rank()
    if total <= inst.k + 1:
        witness = Witness(
            subfamily=(),
            complement_flat=inst.ids,
            complement_rank=total,
            hyperplane=Hyperplane.coordinate(inst.d),
            vacuous=True,
        )
        return _emit(inst, witness)

    flats = enumerate_low_rank_flats(matroid, inst.k + 1)
    candidates = []
    for flat in flats:
        subfamily = tuple(x for x in inst.ids if x not in flat.members)
        candidates.append((subfamily, flat))
    candidates.sort(key=lambda c: (-len(c[0]), sorted(c[0])))

    task = ShardedTask("verify_theorem", jobs)
    found = task.first(
        partial(_attempt, inst), [(i, subfamily) for i, (subfamily, _) in enumerate(candidates)]
    )
    if found is None:
        logger.error("Theorem violated", flats=len(candidates))
        return _emit(inst, TheoremViolated(instance_digest(inst), len(candidates)))

    index, hyperplane = found
    subfamily, flat = candidates[index]
    witness = Witness(
        subfamily=subfamily,
        complement_flat=matroid.ordered(flat.members),
        complement_rank=flat.rank,
        hyperplane=hyperplane,
        flats_examined=index + 1,
    )
    return _emit(inst, witness)


def colorful_interpret(inst: Instance, witness: Witness) -> int:
    """Index of a color class contained in G, with the transversal re-checked on it."""
    if not isinstance(inst.matroid, PartitionMatroid):
        raise MatroidError("colorful interpretation needs a partition matroid")
    classes = inst.matroid.class_members()
    if len(classes) != inst.k + 2:
        raise MatroidError(f"expected {inst.k + 2} color classes, found {len(classes)}")

    chosen = set(witness.subfamily)
    for index, members in classes.items():
        if set(members) <= chosen:
            for label in members:
                if not witness.hyperplane.meets(inst.member(label)):
                    raise InvariantError(f"hyperplane misses {label!r} in class {index}")
            return index
    raise InvariantError("no color class lies inside the witness subfamily")


def copy_id(copy: int, label: Label) -> Label:
    return f"c{copy}:{label}"


def replicate_classic(
    family: Sequence[Polytope],
    phi: Mapping[Label, Point],
    k: int,
    d: int,
    meta: Mapping[str, Any] | None = None,
) -> Instance:
    """k+2 relabeled copies of F under the partition matroid whose classes are the copies."""
    members: list[Polytope] = []
    classes: dict[Label, int] = {}
    images: dict[Label, Point] = {}
    for copy in range(k + 2):
        for polytope in family:
            label = copy_id(copy, polytope.id)
            members.append(Polytope(label, polytope.vertices))
            classes[label] = copy
            images[label] = phi[polytope.id]
    return Instance(
        d=d,
        k=k,
        family=tuple(members),
        matroid=PartitionMatroid(classes),
        phi=images,
        meta=dict(meta or {}),
    )
