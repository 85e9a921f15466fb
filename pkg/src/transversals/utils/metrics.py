"""Prometheus metrics for enumeration workloads."""

from pathlib import Path

from prometheus_client import REGISTRY, Counter, Histogram, write_to_textfile

STAR_PAIRS = Counter(
    "transversals_star_pairs_total",
    "Independent configurations examined by the hypothesis checkers",
    ["condition"],  # condition: star or star_lifted
)

LP_SOLVES = Counter(
    "transversals_lp_solves_total",
    "Exact feasibility problems solved",
    ["outcome"],  # outcome: feasible or infeasible
)

TRANSVERSAL_CANDIDATES = Counter(
    "transversals_transversal_candidates_total",
    "Candidate normals tested by the transversal search",
)

COVECTORS = Counter(
    "transversals_covectors_total",
    "Covectors produced by arrangement enumeration",
)

GENERATOR_ATTEMPTS = Counter(
    "transversals_generator_attempts_total",
    "Instance generator attempts",
    ["generator", "outcome"],  # outcome: accepted or rejected
)

VERIFICATIONS = Counter(
    "transversals_verifications_total",
    "Theorem verification outcomes",
    ["status"],
)

COMMAND_DURATION = Histogram(
    "transversals_command_duration_seconds",
    "Command duration in seconds",
    ["command"],
    buckets=[0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 30.0, 120.0, 600.0],
)


def write_metrics(path: str | Path) -> None:
    """Write the process registry in text exposition format."""
    write_to_textfile(str(path), REGISTRY)
