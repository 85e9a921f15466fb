"""Audit the objects used in the proof of the theorem on one lifted instance.

Homology checks are a one-sided proxy: k-connectedness forces vanishing reduced homology
through degree k, so a nonzero Betti number refutes a connectivity claim while zeros
only support it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial
from typing import Any

import structlog

from transversals.errors import EXIT_AUDIT_FAILED, EXIT_OK
from transversals.models.instance import instance_digest
from transversals.services.geometry import SignVector, realize_sign_vector, sign_vector
from transversals.services.hypothesis import check_star, check_star_lifted
from transversals.services.lifting import LiftedInstance, disjointness_equivalence_audit
from transversals.services.topology import (
    BettiVector,
    SimplicialComplex,
    barycentric_skeleton,
    build_K,
    check_free_z2,
    euler_characteristic_cells,
    induced,
    open_face,
    reduced_betti_gf2,
)
from transversals.services.transversal import (
    CellComplex,
    conformal,
    enumerate_covectors,
    format_signs,
    subfamily_of_cell,
)
from transversals.tasks import ShardedTask

logger = structlog.get_logger()

PROXY_NOTE = "proxy: necessary condition"


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    witness: Any = None
    flagged: int = 0

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {"name": self.name, "passed": self.passed, "detail": self.detail}
        if self.witness is not None:
            payload["witness"] = self.witness
        if self.flagged:
            payload["flagged"] = self.flagged
        return payload


@dataclass(frozen=True)
class AuditReport:
    digest: str
    checks: tuple[CheckResult, ...]
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.passed else EXIT_AUDIT_FAILED

    def check(self, name: str) -> CheckResult:
        return next(c for c in self.checks if c.name == name)

    def to_dict(self) -> dict[str, Any]:
        return {
            "status": "passed" if self.passed else "failed",
            "digest": self.digest,
            "checks": [c.to_dict() for c in self.checks],
            "notes": list(self.notes),
        }


def check_vanishing_homology(
    name: str, complex_: SimplicialComplex, up_to: int, *, max_faces: int | None = None
) -> CheckResult:
    """Fail when any reduced GF(2) Betti number in degrees 0..up_to is nonzero."""
    betti = reduced_betti_gf2(complex_, up_to, max_faces=max_faces)
    if any(betti):
        return CheckResult(name, False, f"nonzero reduced Betti numbers {list(betti)}", list(betti))
    return CheckResult(name, True, f"{PROXY_NOTE}; reduced Betti numbers vanish through degree {up_to}")


@dataclass(frozen=True)
class _CovectorFindings:
    sigma: SignVector
    realized: bool
    antipodal: bool
    rank_equal: bool
    bound_applies: bool
    betti: BettiVector | None


def _audit_covector(
    lifted: LiftedInstance, k_complex: SimplicialComplex, cells: CellComplex, sigma: SignVector
) -> _CovectorFindings:
    realized = realize_sign_vector(sigma, lifted.pool, lifted.n) is not None
    members = subfamily_of_cell(sigma, lifted, cells)
    negated = tuple(-s for s in sigma)
    opposite = subfamily_of_cell(negated, lifted, cells) if negated in cells.covectors else None
    matroid = lifted.matroid
    rank = matroid.rank(members)
    bound_applies = rank > lifted.k + 1
    betti = None
    if bound_applies:
        betti = reduced_betti_gf2(induced(k_complex, members), lifted.k)
    return _CovectorFindings(
        sigma=sigma,
        realized=realized,
        antipodal=opposite == lifted.reflect(members),
        rank_equal=opposite is not None and rank == matroid.rank(members | opposite),
        bound_applies=bound_applies,
        betti=betti,
    )


def _first_failure(findings: list[_CovectorFindings], attribute: str) -> str | None:
    for finding in findings:
        if not getattr(finding, attribute):
            return format_signs(finding.sigma)
    return None


def _as_check(name: str, failure: str | None, ok: str, bad: str) -> CheckResult:
    if failure is None:
        return CheckResult(name, True, ok)
    return CheckResult(name, False, bad, failure)


def _hypothesis_agreement(lifted: LiftedInstance, jobs: int | None = None) -> CheckResult:
    plain = check_star(lifted.source, jobs=jobs)
    linear = check_star_lifted(lifted, jobs=jobs)
    state = "holds" if plain is None else "fails"
    if (plain is None) == (linear is None):
        return CheckResult("hypothesis_agreement", True, f"(∗) {state} and (∗̌) agrees")
    witness = plain.to_dict() if plain is not None else linear.to_dict()  # type: ignore[union-attr]
    return CheckResult("hypothesis_agreement", False, f"(∗) {state} but (∗̌) disagrees", witness)


def audit(
    lifted: LiftedInstance, *, jobs: int | None = None, max_vertices: int | None = None
) -> AuditReport:
    """Pass/fail per property of the cell complex, the subfamily map F̌(σ), K and L."""
    digest = instance_digest(lifted.source)
    notes = (
        PROXY_NOTE,
        "k-connectedness itself is not certified for k >= 1",
    )
    if not lifted.family:
        logger.info("Audit vacuous", reason="empty family")
        return AuditReport(digest, (CheckResult("vacuous", True, "empty family"),), notes)

    n, k = lifted.n, lifted.k
    checks: list[CheckResult] = []

    equivalence = disjointness_equivalence_audit(lifted.source)
    checks.append(
        CheckResult(
            "lift_equivalence",
            equivalence.passed,
            f"{equivalence.pairs_checked} pairs",
            equivalence.to_dict()["counterexample"],
        )
    )
    checks.append(_hypothesis_agreement(lifted, jobs))

    cells = enumerate_covectors(lifted.pool, n, max_vertices=max_vertices)
    sigmas = cells.sorted_covectors()

    bad_witness = next(
        (s for s, w in cells.covectors.items() if sign_vector(w, lifted.pool) != s), None
    )
    checks.append(
        _as_check(
            "covector_witnesses",
            format_signs(bad_witness) if bad_witness is not None else None,
            f"{len(sigmas)} witnesses reproduce their covectors",
            "witness does not reproduce its covector",
        )
    )
    unpaired = next((s for s in sigmas if tuple(-x for x in s) not in cells.covectors), None)
    checks.append(
        _as_check(
            "negation_closed",
            format_signs(unpaired) if unpaired is not None else None,
            "covector set is closed under negation",
            "negated covector missing",
        )
    )
    chi = euler_characteristic_cells(cells)
    expected = 1 + (-1) ** (n - 1)
    checks.append(
        CheckResult(
            "euler_characteristic",
            chi == expected,
            f"chi = {chi}, sphere S^{n - 1} has {expected}",
            None if chi == expected else chi,
        )
    )

    k_complex = build_K(lifted)
    open_k_face = open_face(k_complex.faces)
    checks.append(
        _as_check(
            "K_downward_closed",
            None if open_k_face is None else str(sorted(open_k_face)),
            f"{len(k_complex.faces)} faces, every facet of a face is present",
            "a face is missing one of its facets",
        )
    )
    checks.append(
        CheckResult("K_free_z2", check_free_z2(k_complex), "involution P -> -P on K")
    )

    task = ShardedTask("audit", jobs)
    findings = task.map(partial(_audit_covector, lifted, k_complex, cells), sigmas)
    checks.append(
        _as_check(
            "well_defined",
            _first_failure(findings, "realized"),
            "every covector has an independent LP witness",
            "covector has no LP witness",
        )
    )

    subfamilies = {f.sigma: subfamily_of_cell(f.sigma, lifted, cells) for f in findings}
    monotone_failure = None
    for sigma in sigmas:
        for tau in sigmas:
            if sigma != tau and conformal(sigma, tau) and not subfamilies[sigma] <= subfamilies[tau]:
                monotone_failure = [format_signs(sigma), format_signs(tau)]
                break
        if monotone_failure:
            break
    checks.append(
        CheckResult(
            "monotonicity",
            monotone_failure is None,
            "F(sigma) grows along the face order",
            monotone_failure,
        )
    )
    checks.append(
        _as_check(
            "antipodal_subfamilies",
            _first_failure(findings, "antipodal"),
            "F(-sigma) = -F(sigma)",
            "F(-sigma) differs from -F(sigma)",
        )
    )
    checks.append(
        _as_check(
            "rank_equality",
            _first_failure(findings, "rank_equal"),
            "rank of F(sigma) equals rank of F(sigma) with F(-sigma)",
            "rank changes when F(-sigma) is added",
        )
    )

    outside = sum(1 for f in findings if not f.bound_applies)
    checks.append(
        CheckResult(
            "lemma_bound",
            True,
            f"rank of F(sigma) <= k+1 on {outside} of {len(findings)} covectors; bound not applicable there",
            flagged=outside,
        )
    )
    homology_failure = next(
        (f for f in findings if f.betti is not None and any(f.betti)), None
    )
    checks.append(
        CheckResult(
            "K_subfamily_homology",
            homology_failure is None,
            f"{PROXY_NOTE}; K[F(sigma)] acyclic through degree {k} where rank > k+1",
            None
            if homology_failure is None
            else {"sigma": format_signs(homology_failure.sigma), "betti": list(homology_failure.betti or ())},
        )
    )

    skeleton = barycentric_skeleton(cells, k + 1)
    checks.append(check_vanishing_homology("L_homology", skeleton, k))
    checks.append(CheckResult("L_free_z2", check_free_z2(skeleton), "cell negation on L"))

    report = AuditReport(digest, tuple(checks), notes)
    logger.info(
        "Audit finished",
        passed=report.passed,
        covectors=len(sigmas),
        failed=[c.name for c in checks if not c.passed],
    )
    return report
