"""Tests for hyperplane transversals and covector enumeration."""

import random
from fractions import Fraction
from itertools import product

import pytest

from transversals.errors import (
    CapExceededError,
    DegenerateNormalError,
    DimensionMismatchError,
    InvalidInstanceError,
)
from transversals.services.geometry import Polytope, point, realize_sign_vector, sign_vector
from transversals.services.lifting import lift_instance
from transversals.services.topology import euler_characteristic_cells
from transversals.services.transversal import (
    Hyperplane,
    compose,
    conformal,
    enumerate_covectors,
    find_affine_transversal,
    find_origin_transversal,
    format_signs,
    subfamily_of_cell,
    transversal_covectors,
    transversal_predicate,
)


def _polys(*vertex_lists):
    return [Polytope(f"P{i}", tuple(point(*v) for v in vertices)) for i, vertices in enumerate(vertex_lists)]


def test_sign_helpers():
    """Test sign formatting, conformality and composition."""
    assert format_signs((1, 0, -1)) == "+0-"
    assert conformal((1, 0, 0), (1, -1, 1))
    assert not conformal((1, 0, -1), (1, -1, 1))
    assert compose((1, 0, 0), (-1, -1, 1)) == (1, -1, 1)


def test_hyperplane_canonical():
    """Test the normal is made primitive and the offset scaled with it."""
    hyperplane = Hyperplane.canonical((Fraction(-2), Fraction(4)), Fraction(2))
    assert hyperplane.normal == point(1, -2)
    assert hyperplane.offset == -1
    assert hyperplane.to_dict() == {"normal": ["1", "-2"], "offset": "-1"}


def test_hyperplane_zero_normal():
    """Test a zero normal is rejected."""
    with pytest.raises(DegenerateNormalError):
        Hyperplane.canonical((Fraction(0), Fraction(0)), Fraction(1))


def test_hyperplane_meets():
    """Test the slab test on a segment crossing and missing the line."""
    hyperplane = Hyperplane.coordinate(2)
    assert hyperplane.normal == point(1, 0)
    assert hyperplane.meets(Polytope("S", (point(-1, 3), point(1, 3))))
    assert not hyperplane.meets(Polytope("T", (point(1, 3), point(2, 3))))


def test_transversal_predicate_zero_normal():
    """Test the predicate needs a nonzero normal."""
    with pytest.raises(DegenerateNormalError):
        transversal_predicate(point(0, 0), _polys([(1, 0)]), 2)


def test_origin_transversal_forced():
    """Test two points on the vertical axis force the normal (1, 0)."""
    assert find_origin_transversal(_polys([(0, 1)], [(0, -3)]), 2) == point(1, 0)


def test_origin_transversal_impossible():
    """Test two independent points admit no central transversal."""
    assert find_origin_transversal(_polys([(1, 0)], [(0, 1)]), 2) is None


def test_origin_transversal_satisfies_predicate():
    """Test the returned normal meets every polytope."""
    polys = _polys([(1, -1), (1, 1)], [(2, -1), (2, 3)])
    a = find_origin_transversal(polys, 2)
    assert a is not None
    assert transversal_predicate(a, polys, 2)


def test_affine_transversal_collinear(collinear_instance):
    """Test collinear points are met by the line y = x."""
    hyperplane = find_affine_transversal(collinear_instance, ["A", "B", "C"])
    assert hyperplane == Hyperplane(point(1, -1), Fraction(0))


def test_affine_transversal_none(make_instance):
    """Test three non-collinear points have no common line."""
    inst = make_instance(
        d=2,
        k=1,
        sets={"A": [(0, 0)], "B": [(1, 0)], "C": [(0, 1)]},
        phi={"A": (0,), "B": (1,), "C": (2,)},
    )
    assert find_affine_transversal(inst, ["A", "B", "C"]) is None
    assert find_affine_transversal(inst, ["A", "B"]) is not None


def test_affine_transversal_empty_and_unknown(collinear_instance):
    """Test the empty subfamily and unknown ids."""
    assert find_affine_transversal(collinear_instance, []) == Hyperplane.coordinate(2)
    with pytest.raises(InvalidInstanceError):
        find_affine_transversal(collinear_instance, ["Z"])


def test_covectors_of_coordinate_axes():
    """Test the two coordinate lines cut the circle into eight cells."""
    cells = enumerate_covectors([point(1, 0), point(0, 1)], 2)
    assert len(cells.covectors) == 8
    assert (0, 0) not in cells.covectors
    assert euler_characteristic_cells(cells) == 0


def test_covectors_of_parallel_vectors():
    """Test parallel vectors leave a lineality line."""
    cells = enumerate_covectors([point(1, 0), point(2, 0)], 2)
    assert set(cells.covectors) == {(1, 1), (-1, -1), (0, 0)}
    assert len(cells.lineality) == 1
    assert euler_characteristic_cells(cells) == 0


def test_lineality_cells_with_multiplicity():
    """Test the zero covector expands to the two points of its sphere."""
    cells = enumerate_covectors([point(1, 0)], 2)
    labels = [c.label for c in cells.cells]
    assert labels == ["0|-", "0|+", "-", "+"]
    assert [c.dim for c in cells.cells] == [0, 0, 1, 1]
    assert -cells.cells[0] == cells.cells[1]


def test_covectors_of_octahedron():
    """Test the coordinate planes of R^3 give the octahedral sphere."""
    pool = [point(1, 0, 0), point(0, 1, 0), point(0, 0, 1)]
    cells = enumerate_covectors(pool, 3)
    assert len(cells.covectors) == 26
    assert euler_characteristic_cells(cells) == 2
    for sigma, witness in cells.covectors.items():
        assert sign_vector(witness, pool) == sigma
        assert cells.dim_of(sigma) == 2 - sum(1 for s in sigma if s == 0)


def _assert_covectors_complete(pool, n):
    cells = enumerate_covectors(pool, n)
    for sigma in product((-1, 0, 1), repeat=len(pool)):
        realized = realize_sign_vector(sigma, pool, n) is not None
        assert realized == (sigma in cells.covectors), format_signs(sigma)
    assert ((0,) * len(pool) in cells.covectors) == bool(cells.lineality)


@pytest.mark.slow
def test_covectors_match_brute_force():
    """Test a sign vector is a covector exactly when some normal realizes it."""
    rng = random.Random(51)
    checked = 0
    while checked < 8:
        n = rng.randint(2, 3)
        pool = [point(*(rng.randint(-2, 2) for _ in range(n))) for _ in range(rng.randint(1, 6))]
        if any(all(x == 0 for x in v) for v in pool):
            continue
        _assert_covectors_complete(pool, n)
        checked += 1
    _assert_covectors_complete([point(1, 1, 0), point(2, 2, 0), point(-1, 0, 0)], 3)


def test_covector_pool_validation():
    """Test empty pools, zero vectors and the vertex cap."""
    with pytest.raises(InvalidInstanceError):
        enumerate_covectors([], 2)
    with pytest.raises(DegenerateNormalError):
        enumerate_covectors([point(0, 0)], 2)
    with pytest.raises(CapExceededError, match="--max-vertices"):
        enumerate_covectors([point(1, 0), point(0, 1)], 2, max_vertices=1)


def test_subfamily_of_cell(collinear_instance):
    """Test the upward cell selects the original members."""
    lifted = lift_instance(collinear_instance)
    sigma = sign_vector(point(0, 0, 1), lifted.pool)
    assert subfamily_of_cell(sigma, lifted) == frozenset({"A", "B", "C"})
    cells = enumerate_covectors(lifted.pool, lifted.n)
    assert subfamily_of_cell(sigma, lifted, cells) == frozenset({"A", "B", "C"})


def test_subfamily_of_unrealized_cell(collinear_instance):
    """Test a sign vector positive on a vector and its negation is not a cell."""
    lifted = lift_instance(collinear_instance)
    with pytest.raises(InvalidInstanceError, match="not realized"):
        subfamily_of_cell((1,) * len(lifted.pool), lifted)
    with pytest.raises(DimensionMismatchError):
        subfamily_of_cell((1,), lifted)


def test_transversal_covectors_agree_with_search():
    """Test transversal cells exist exactly when a transversal normal exists."""
    forced = _polys([(0, 1)], [(0, -3)])
    assert transversal_covectors(forced, 2) == [(0, 0)]
    assert transversal_covectors(_polys([(1, 0)], [(0, 1)]), 2) == []


def test_transversal_covectors_empty_pool():
    """Test polytopes through the origin leave every normal admissible."""
    assert transversal_covectors(_polys([(0, 0), (1, 1)]), 2) == [()]
