"""Tests for the theorem verifier and the colorful specialization."""

from fractions import Fraction
from itertools import combinations

import pytest

from transversals.errors import EXIT_HYPOTHESIS_FAILED, EXIT_THEOREM_VIOLATED, InvariantError, MatroidError
from transversals.services.generators import RandomParams, gen_product, sample_filtered
from transversals.services.geometry import point
from transversals.services.matroids import UniformMatroid
from transversals.services.transversal import Hyperplane, find_affine_transversal
from transversals.services.verifier import (
    HypothesisFailed,
    TheoremViolated,
    Witness,
    colorful_interpret,
    replicate_classic,
    reverify_witness,
    verify_theorem,
)


@pytest.fixture
def colorful_instance(collinear_instance):
    """Three color classes, each a copy of the collinear family."""
    return replicate_classic(collinear_instance.family, collinear_instance.phi, k=1, d=2)


def test_collinear_witness(collinear_instance):
    """Test the whole family is met by the line y = x."""
    result = verify_theorem(collinear_instance)
    assert isinstance(result, Witness)
    assert result.subfamily == ("A", "B", "C")
    assert result.complement_flat == ()
    assert result.complement_rank == 0
    assert result.hyperplane == Hyperplane(point(1, -1), Fraction(0))
    assert result.flats_examined == 1
    assert not result.vacuous
    assert result.to_dict()["stats"] == {"flats_examined": 1, "nonempty": True}


def test_trivial_branch(make_instance):
    """Test a low-rank matroid gives the vacuous witness."""
    inst = make_instance(
        d=2,
        k=1,
        sets={"A": [(0, 0)], "B": [(1, 0)], "C": [(0, 1)]},
        phi={"A": (0,), "B": (1,), "C": (2,)},
        matroid=UniformMatroid(["A", "B", "C"], 2),
    )
    result = verify_theorem(inst)
    assert isinstance(result, Witness)
    assert result.vacuous
    assert result.subfamily == ()
    assert result.complement_flat == ("A", "B", "C")
    assert result.hyperplane == Hyperplane.coordinate(2)
    assert not result.nonempty


def test_hypothesis_failed(violating_instance):
    """Test a failing hypothesis is reported with exit code 3."""
    result = verify_theorem(violating_instance)
    assert isinstance(result, HypothesisFailed)
    assert result.exit_code == EXIT_HYPOTHESIS_FAILED
    assert result.to_dict()["violation"]["G2"] == ["B"]


def test_product_witness():
    """Test vertical fibers over a line of points are met by a common line."""
    inst = gen_product([(0,), (2,), (5,)], d=2)
    result = verify_theorem(inst)
    assert isinstance(result, Witness)
    assert result.subfamily == ("P1", "P2", "P3")
    reverify_witness(inst, result)


def test_flat_search_is_complete():
    """Test flat complements find a witness whenever any small-rank complement has one."""
    batch = sample_filtered(RandomParams(d=2, k=1, members=3), seed=21, attempts=100, count=3)
    assert batch.accepted >= 1
    for inst in batch.instances:
        result = verify_theorem(inst)
        assert isinstance(result, Witness)

        best = -1
        for size in range(len(inst.ids) + 1):
            for removed in combinations(inst.ids, size):
                if inst.matroid.rank(removed) > inst.k + 1:
                    continue
                kept = [x for x in inst.ids if x not in removed]
                if find_affine_transversal(inst, kept) is not None:
                    best = max(best, len(kept))
        assert best >= 0
        assert len(result.subfamily) <= best


def test_parallel_verification_matches_inline(collinear_instance):
    """Test the witness does not depend on the number of jobs."""
    assert verify_theorem(collinear_instance, jobs=2) == verify_theorem(collinear_instance, jobs=1)


def test_reverify_rejects_bad_hyperplane(collinear_instance):
    """Test re-verification catches a hyperplane missing a member."""
    witness = Witness(
        subfamily=("A", "B", "C"),
        complement_flat=(),
        complement_rank=0,
        hyperplane=Hyperplane(point(1, 0), Fraction(100)),
    )
    with pytest.raises(InvariantError, match="misses"):
        reverify_witness(collinear_instance, witness)


def test_reverify_rejects_bad_split(collinear_instance):
    """Test re-verification checks G and its complement partition the family."""
    witness = Witness(("A",), ("A", "B"), 2, Hyperplane.coordinate(2))
    with pytest.raises(InvariantError, match="split"):
        reverify_witness(collinear_instance, witness)


def test_theorem_violated_payload():
    """Test the violation result carries the digest and exit code 4."""
    result = TheoremViolated("ab" * 32, 7)
    assert result.exit_code == EXIT_THEOREM_VIOLATED
    assert result.to_dict() == {"status": "theorem_violated", "digest": "ab" * 32, "flats_examined": 7}


def test_replicate_classic(collinear_instance):
    """Test k+2 relabeled copies form the color classes."""
    inst = replicate_classic(collinear_instance.family, collinear_instance.phi, k=1, d=2)
    assert len(inst.family) == 9
    assert inst.ids[:3] == ("c0:A", "c0:B", "c0:C")
    assert inst.matroid.class_members()[2] == ("c2:A", "c2:B", "c2:C")
    assert inst.phi["c1:B"] == point(1)


def test_colorful_interpretation(colorful_instance):
    """Test a whole color class is met by the witness line."""
    result = verify_theorem(colorful_instance)
    assert isinstance(result, Witness)
    assert len(result.subfamily) == 9
    assert colorful_interpret(colorful_instance, result) == 0


def test_colorful_interpretation_picks_untouched_class(colorful_instance):
    """Test the class left out of the complement flat is reported."""
    classes = colorful_instance.matroid.class_members()
    witness = Witness(
        subfamily=classes[2],
        complement_flat=classes[0] + classes[1],
        complement_rank=2,
        hyperplane=Hyperplane(point(1, -1), Fraction(0)),
    )
    assert colorful_interpret(colorful_instance, witness) == 2


def test_colorful_interpretation_needs_partition(collinear_instance):
    """Test non-partition matroids are rejected."""
    witness = verify_theorem(collinear_instance)
    with pytest.raises(MatroidError):
        colorful_interpret(collinear_instance, witness)
