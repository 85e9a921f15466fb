"""Tests for the exact geometry kernel."""

import random
from fractions import Fraction

import pytest

from transversals.errors import (
    DegenerateNormalError,
    DimensionMismatchError,
    InvalidInstanceError,
)
from transversals.services.geometry import (
    HullMethod,
    Polytope,
    canonical_ray,
    feasible_nonnegative,
    format_rational,
    hulls_intersect,
    negate,
    null_space_ray,
    origin_in_hull,
    parse_rational,
    point,
    point_sets_intersect,
    rank_of_vectors,
    realize_sign_vector,
    sign_vector,
)


def test_parse_rational_reduces():
    """Test rationals are parsed and reduced."""
    assert parse_rational("-3/6") == Fraction(-1, 2)
    assert parse_rational("7") == Fraction(7)


@pytest.mark.parametrize("text", ["1.5", "abc", "1/", "/2", "1/-2", ""])
def test_parse_rational_malformed(text):
    """Test malformed rationals are rejected."""
    with pytest.raises(ValueError, match="malformed rational"):
        parse_rational(text)


def test_parse_rational_zero_denominator():
    """Test a zero denominator is reported as such."""
    with pytest.raises(ValueError, match="zero denominator"):
        parse_rational("1/0")


def test_format_rational_canonical():
    """Test the wire form omits unit denominators."""
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-1, 2)) == "-1/2"
    assert format_rational(0) == "0"


def test_canonical_ray():
    """Test rays are scaled to primitive integers with a positive leading entry."""
    assert canonical_ray(point(-2, 4)) == point(1, -2)
    assert canonical_ray(point(0, "-1/2", "1/3")) == point(0, 3, -2)


def test_canonical_ray_zero_vector():
    """Test the zero vector has no canonical ray."""
    with pytest.raises(DegenerateNormalError):
        canonical_ray(point(0, 0))


def test_rank_and_null_space():
    """Test rank and the canonical null ray of a corank-one system."""
    vectors = [point(1, 1, 0), point(0, 0, 1), point(2, 2, 1)]
    assert rank_of_vectors(vectors, 3) == 2
    assert null_space_ray(vectors, 3) == point(1, -1, 0)
    assert null_space_ray([point(1, 0, 0)], 3) is None


def test_rank_dimension_mismatch():
    """Test mixing dimensions raises."""
    with pytest.raises(DimensionMismatchError):
        rank_of_vectors([point(1, 0), point(1, 0, 0)], 2)


def test_feasible_nonnegative():
    """Test the phase-one simplex returns a nonnegative solution."""
    solution = feasible_nonnegative([[1, 1, 0], [0, 1, 1]], [1, 1], 3)
    assert solution is not None
    assert all(x >= 0 for x in solution)
    assert solution[0] + solution[1] == 1
    assert solution[1] + solution[2] == 1


def test_feasible_nonnegative_infeasible():
    """Test an infeasible system returns None."""
    assert feasible_nonnegative([[1, 1]], [-1], 2) is None


@pytest.mark.parametrize("method", list(HullMethod))
def test_origin_in_hull(method):
    """Test origin membership for a triangle around it and a segment beside it."""
    triangle = [point(1, 0), point(-1, 1), point(-1, -1)]
    assert origin_in_hull(triangle, 2, method)
    assert not origin_in_hull([point(1, 0), point(2, 0)], 2, method)
    assert origin_in_hull([point(1, 0), point(-3, 0)], 2, method)
    assert not origin_in_hull([], 2, method)


def test_hull_methods_agree():
    """Test the simplex and Carathéodory methods agree on random point sets."""
    rng = random.Random(11)
    for _ in range(60):
        points = [
            point(rng.randint(-2, 2), rng.randint(-2, 2), rng.randint(-2, 2))
            for _ in range(rng.randint(1, 5))
        ]
        assert origin_in_hull(points, 3, HullMethod.SIMPLEX) == origin_in_hull(
            points, 3, HullMethod.CARATHEODORY
        )


def test_point_sets_intersect():
    """Test crossing segments meet and parallel ones do not."""
    assert point_sets_intersect([point(0, 0), point(2, 2)], [point(0, 2), point(2, 0)], 2)
    assert not point_sets_intersect([point(0, 0), point(2, 0)], [point(0, 1), point(2, 1)], 2)


def test_hulls_touching_at_vertex():
    """Test closed hulls sharing one vertex intersect."""
    first = Polytope("A", (point(0, 0), point(1, 0)))
    second = Polytope("B", (point(1, 0), point(2, 5)))
    assert hulls_intersect(first, second)


def test_realize_sign_vector():
    """Test realized sign vectors come with a reproducing witness."""
    pool = [point(1, 0), point(0, 1), point(1, 1)]
    a = realize_sign_vector((1, -1, 0), pool, 2)
    assert a is not None
    assert sign_vector(a, pool) == (1, -1, 0)
    assert realize_sign_vector((1, 1, -1), pool, 2) is None


def test_realize_zero_sign_vector():
    """Test the zero sign vector is realized only with a nontrivial orthogonal complement."""
    assert realize_sign_vector((0, 0), [point(1, 0), point(0, 1)], 2) is None
    assert realize_sign_vector((0,), [point(1, 0)], 2) == point(0, 1)


def test_realize_sign_vector_length_mismatch():
    """Test a sign vector of the wrong length raises."""
    with pytest.raises(DimensionMismatchError):
        realize_sign_vector((1,), [point(1, 0), point(0, 1)], 2)


def test_sign_vector_zero_normal():
    """Test a zero normal does not determine a cell."""
    with pytest.raises(DegenerateNormalError):
        sign_vector(point(0, 0), [point(1, 0)])


def test_polytope_validation():
    """Test empty and mixed-dimension vertex lists are rejected."""
    with pytest.raises(InvalidInstanceError):
        Polytope("P", ())
    with pytest.raises(DimensionMismatchError):
        Polytope("P", (point(0, 0), point(0, 0, 0)))


def test_polytope_lift_and_negate():
    """Test lifting appends the height and negation flips every coordinate."""
    lifted = Polytope("P", (point(2),)).lifted(1)
    assert lifted.vertices == (point(2, 1),)
    assert lifted.negated("-P").vertices == (point(-2, -1),)


def _random_points(rng, n, count, low=-2, high=2):
    return [point(*(rng.randint(low, high) for _ in range(n))) for _ in range(count)]


def test_origin_in_hull_ignores_order_and_repeats():
    """Test shuffling or repeating the points never changes origin membership."""
    rng = random.Random(31)
    for _ in range(60):
        n = rng.randint(1, 3)
        points = _random_points(rng, n, rng.randint(1, 5))
        expected = origin_in_hull(points, n)
        shuffled = rng.sample(points, len(points))
        assert origin_in_hull(shuffled, n) == expected
        assert origin_in_hull(shuffled + [rng.choice(points)], n) == expected


def test_origin_in_hull_of_antipodal_pair():
    """Test a point together with its negation always surrounds the origin."""
    rng = random.Random(32)
    for _ in range(40):
        n = rng.randint(1, 3)
        points = _random_points(rng, n, rng.randint(1, 4))
        chosen = rng.choice(points)
        assert origin_in_hull(points + [negate(chosen)], n)


def test_hulls_intersect_is_symmetric():
    """Test hull intersection does not depend on argument order."""
    rng = random.Random(33)
    for _ in range(60):
        n = rng.randint(1, 3)
        first = Polytope("A", tuple(_random_points(rng, n, rng.randint(1, 3))))
        second = Polytope("B", tuple(_random_points(rng, n, rng.randint(1, 3))))
        assert hulls_intersect(first, second) == hulls_intersect(second, first)


def test_sign_vector_of_negated_normal():
    """Test negating the normal negates every sign."""
    rng = random.Random(34)
    for _ in range(60):
        n = rng.randint(1, 4)
        pool = _random_points(rng, n, rng.randint(1, 6))
        a = point(*(rng.randint(-3, 3) for _ in range(n)))
        if all(x == 0 for x in a):
            continue
        assert sign_vector(negate(a), pool) == tuple(-s for s in sign_vector(a, pool))
