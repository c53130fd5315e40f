import math

import pytest

from staticwave import (
    Circle,
    CircleClosure,
    DirectSum,
    DisjointHalfLines,
    HalfLine,
    HalfLineRobin,
    Interval,
    IntervalDirichlet,
    IntervalFirstKind,
    IntervalSecondKind,
    MassShift,
)

ROOT2 = math.sqrt(2.0)


def catalog_cases():
    """(label, manifold, extension, bump kwargs) covering every family."""
    return [
        ("circle", Circle(2 * math.pi), CircleClosure(), dict(center=3.0, halfwidth=0.6)),
        ("robin_positive", HalfLine(), HalfLineRobin(math.pi / 4), dict(center=1.5, halfwidth=0.25)),
        ("robin_bound", HalfLine(), HalfLineRobin(-math.pi / 4), dict(center=1.5, halfwidth=0.25)),
        ("dirichlet", Interval(1.0), IntervalDirichlet(), dict(center=0.5, halfwidth=0.15)),
        ("neumann", Interval(1.0), IntervalFirstKind(0.0, 0.0, 0.0), dict(center=0.5, halfwidth=0.15)),
        (
            "endpoint_coupled",
            Interval(1.0),
            IntervalFirstKind(0.0, 0.0, 1.0),
            dict(center=0.625, halfwidth=0.125),
        ),
        (
            "periodic",
            Interval(2 * math.pi),
            IntervalSecondKind(1 / ROOT2, 1 / ROOT2, 0.0),
            dict(center=3.0, halfwidth=0.6),
        ),
        (
            "massive_circle",
            Circle(2 * math.pi),
            MassShift(CircleClosure(), 1.0),
            dict(center=3.0, halfwidth=0.6),
        ),
        (
            "direct_sum",
            DisjointHalfLines(3),
            DirectSum(tuple(HalfLineRobin(-1.0 / (n + 2)) for n in range(3))),
            dict(center=1.5, halfwidth=0.3),
        ),
    ]


@pytest.fixture(scope="session")
def catalog():
    return catalog_cases()
