"""Tests for the hypothesis checks (∗) and (∗̌)."""

import random

import pytest

from transversals.errors import CapExceededError
from transversals.services.geometry import point_sets_intersect
from transversals.services.hypothesis import (
    LiftedStarViolation,
    StarViolation,
    check_star,
    check_star_lifted,
)
from transversals.services.lifting import lift_instance
from transversals.services.matroids import UniformMatroid


class RecordingUniform(UniformMatroid):
    """Uniform matroid remembering the sizes of the subsets it ranked."""

    def __init__(self, ground, r):
        super().__init__(ground, r)
        self.sizes = set()

    def _rank(self, subset):
        self.sizes.add(len(subset))
        return super()._rank(subset)


def _random_sets(rng, labels):
    sets = {
        x: [(rng.randint(-2, 2), rng.randint(-2, 2)) for _ in range(rng.randint(1, 2))]
        for x in labels
    }
    phi = {x: (rng.randint(-1, 1),) for x in labels}
    return sets, phi


def test_star_holds_on_collinear(collinear_instance):
    """Test points on a line ordered like their images satisfy (∗)."""
    assert check_star(collinear_instance) is None
    assert check_star_lifted(lift_instance(collinear_instance)) is None


def test_star_violation(violating_instance):
    """Test equal images of disjoint points violate (∗)."""
    violation = check_star(violating_instance)
    assert violation == StarViolation(("A",), ("B",))
    assert violation.to_dict()["G1"] == ["A"]


def test_lifted_star_violation(violating_instance):
    """Test the linearized check reports a member and a reflection."""
    violation = check_star_lifted(lift_instance(violating_instance))
    assert violation == LiftedStarViolation(("A", "-B"))
    assert violation.to_dict()["G"] == ["A", "-B"]


def test_star_ignores_dependent_unions(make_instance):
    """Test a rank-1 matroid leaves no pair to check."""
    inst = make_instance(
        d=2,
        k=1,
        sets={"A": [(0, 0)], "B": [(1, 0)]},
        phi={"A": (0,), "B": (0,)},
        matroid=UniformMatroid(["A", "B"], 1),
    )
    assert check_star(inst) is None
    assert check_star_lifted(lift_instance(inst)) is None


def test_star_first_violation_in_canonical_order(make_instance):
    """Test the reported violation is the first union by size then ids."""
    inst = make_instance(
        d=2,
        k=1,
        sets={"C": [(0, 5)], "B": [(1, 0)], "A": [(0, 0)]},
        phi={"A": (0,), "B": (0,), "C": (0,)},
        matroid=UniformMatroid(["C", "B", "A"], 3),
    )
    assert check_star(inst) == StarViolation(("A",), ("B",))


def test_star_parallel_matches_inline(make_instance):
    """Test sharding the check over processes gives the same violation."""
    inst = make_instance(
        d=2,
        k=1,
        sets={"A": [(0, 0)], "B": [(0, 1)], "C": [(3, 3)], "D": [(3, 4)]},
        phi={"A": (0,), "B": (1,), "C": (1,), "D": (1,)},
        matroid=UniformMatroid(["A", "B", "C", "D"], 3),
    )
    inline = check_star(inst, jobs=1)
    assert inline is not None
    assert check_star(inst, jobs=2) == inline


def test_star_family_cap(collinear_instance):
    """Test the family cap is enforced with the flag to raise it."""
    with pytest.raises(CapExceededError, match="--max-family"):
        check_star(collinear_instance, max_family=2)


def test_star_limits_unions_to_full_rank(make_instance):
    """Test unions larger than the full rank are never ranked."""
    labels = [f"P{i}" for i in range(14)]
    matroid = RecordingUniform(labels, 3)
    inst = make_instance(
        d=2,
        k=1,
        sets={x: [(i, 0)] for i, x in enumerate(labels)},
        phi={x: (i,) for i, x in enumerate(labels)},
        matroid=matroid,
    )
    assert check_star(inst, max_family=14) is None
    assert max(size for size in matroid.sizes if size != len(labels)) == 3


def test_star_invariant_under_relabeling(make_instance):
    """Test renaming and reordering members never changes whether (∗) holds."""
    rng = random.Random(21)
    renamed = {"A": "z", "B": "y", "C": "x"}
    for _ in range(25):
        sets, phi = _random_sets(rng, list(renamed))
        inst = make_instance(d=2, k=1, sets=sets, phi=phi)
        other = make_instance(
            d=2,
            k=1,
            sets={renamed[x]: v for x, v in reversed(sets.items())},
            phi={renamed[x]: v for x, v in phi.items()},
        )
        assert (check_star(inst) is None) == (check_star(other) is None)


def test_reported_violation_is_genuine(make_instance):
    """Test a reported violation has disjoint hulls whose images meet."""
    rng = random.Random(22)
    found = 0
    for _ in range(25):
        sets, phi = _random_sets(rng, ["A", "B", "C"])
        inst = make_instance(d=2, k=1, sets=sets, phi=phi)
        violation = check_star(inst)
        if violation is None:
            continue
        found += 1
        assert not set(violation.g1) & set(violation.g2)
        assert inst.matroid.is_independent(violation.g1 + violation.g2)
        assert point_sets_intersect(inst.phi_of(violation.g1), inst.phi_of(violation.g2), 1)
        g1, g2 = inst.vertices_of(violation.g1), inst.vertices_of(violation.g2)
        assert not point_sets_intersect(g1, g2, 2)
    assert found > 0
