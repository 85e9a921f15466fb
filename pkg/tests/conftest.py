"""Pytest configuration and fixtures."""

from collections.abc import Callable, Mapping, Sequence
from fractions import Fraction

import pytest

from transversals.config import get_settings
from transversals.services.geometry import Polytope, point
from transversals.services.lifting import Instance
from transversals.services.matroids import RankOracle, UniformMatroid

Coordinates = Sequence[Fraction | int | str]


def build_instance(
    d: int,
    k: int,
    sets: Mapping[str, Sequence[Coordinates]],
    phi: Mapping[str, Coordinates],
    matroid: RankOracle | None = None,
) -> Instance:
    """Instance from plain coordinates; the matroid defaults to uniform of rank k+2."""
    family = tuple(
        Polytope(label, tuple(point(*v) for v in vertices)) for label, vertices in sets.items()
    )
    return Instance(
        d=d,
        k=k,
        family=family,
        matroid=matroid or UniformMatroid(list(sets), k + 2),
        phi={label: point(*image) for label, image in phi.items()},
    )


@pytest.fixture(autouse=True)
def fresh_settings():
    """Re-read settings for every test so monkeypatched env vars apply."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def make_instance() -> Callable[..., Instance]:
    """Factory for instances given as plain coordinates."""
    return build_instance


@pytest.fixture
def collinear_instance() -> Instance:
    """Three points on y = x, φ their x-order, uniform(3), k = 1."""
    return build_instance(
        d=2,
        k=1,
        sets={"A": [(0, 0)], "B": [(1, 1)], "C": [(2, 2)]},
        phi={"A": (0,), "B": (1,), "C": (2,)},
    )


@pytest.fixture
def violating_instance() -> Instance:
    """Two distinct points with equal φ images: (∗) fails for G1={A}, G2={B}."""
    return build_instance(
        d=2,
        k=1,
        sets={"A": [(0, 0)], "B": [(1, 0)]},
        phi={"A": (0,), "B": (0,)},
        matroid=UniformMatroid(["A", "B"], 2),
    )


@pytest.fixture
def two_point_line_instance() -> Instance:
    """Points 1 and 2 on the real line, k = 0, uniform(2); K is a 4-cycle."""
    return build_instance(
        d=1,
        k=0,
        sets={"A": [(1,)], "B": [(2,)]},
        phi={"A": (), "B": ()},
    )


@pytest.fixture
def empty_instance() -> Instance:
    return Instance(d=1, k=0, family=(), matroid=UniformMatroid([], 0), phi={})
