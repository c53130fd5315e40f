import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from staticwave.geometry import (
    Circle,
    DisjointHalfLines,
    HalfLine,
    Interval,
    SpatialSet,
    causal_slice,
    causal_window,
    closed_neighborhood,
    distance,
    in_cauchy_development,
    t_infinity,
    t_ladder,
)


def iset(m, intervals, **kw):
    return SpatialSet.from_intervals(m, intervals, **kw)


class TestDistance:
    def test_circle_shorter_arc(self):
        assert distance(Circle(2 * math.pi), 0.0, 3 * math.pi / 2) == pytest.approx(math.pi / 2)

    def test_interval_absolute_difference(self):
        assert distance(Interval(1.0), 0.2, 0.9) == pytest.approx(0.7)

    def test_half_line_identity(self):
        assert distance(HalfLine(), 3.0, 3.0) == 0.0

    def test_disjoint_components_infinite(self):
        m = DisjointHalfLines(3)
        assert distance(m, (0, 1.0), (2, 1.0)) == math.inf
        assert distance(m, (1, 1.0), (1, 2.5)) == pytest.approx(1.5)


class TestClosedNeighborhood:
    def test_interval_interior_growth(self):
        # oracle: brute-force point-to-set distances on a fine grid
        m = Interval(1.0)
        K = iset(m, [(0.4, 0.6)])
        grown, compact = closed_neighborhood(m, K, 0.2)
        assert compact
        assert grown.pieces == ((0, 0.2, 0.8),)
        import numpy as np

        xs = np.linspace(1e-4, 1 - 1e-4, 2001)
        dists = np.minimum(np.abs(xs - 0.4), np.abs(xs - 0.6))
        dists[(xs >= 0.4) & (xs <= 0.6)] = 0.0
        inside = dists <= 0.2
        assert all(grown.contains(float(x), tol=1e-9) == bool(b) for x, b in zip(xs, inside))

    def test_interval_reaching_both_edges(self):
        m = Interval(1.0)
        K = iset(m, [(0.4, 0.6)])
        grown, compact = closed_neighborhood(m, K, 0.5)
        assert not compact
        assert grown.pieces == ((0, 0.0, 1.0),)

    def test_circle_diameter_covers(self):
        m = Circle(2 * math.pi)
        K = iset(m, [(1.0, 1.5)])
        grown, compact = closed_neighborhood(m, K, math.pi)
        assert compact
        assert grown.measure() == pytest.approx(2 * math.pi)

    def test_circle_wraparound_merge(self):
        m = Circle(2 * math.pi)
        K = iset(m, [(6.0, 6.2)])
        grown, _ = closed_neighborhood(m, K, 0.5)
        # the arc crosses 0: one piece, wrapped
        assert len(grown.pieces) == 1
        assert grown.contains(0.1)
        assert grown.contains(5.6)
        assert not grown.contains(3.0)


class TestCausalSlice:
    def test_equals_metric_ball_when_compact(self):
        m = Interval(1.0)
        K = iset(m, [(0.4, 0.6)])
        sl = causal_slice(m, K, 0.2)
        assert sl.compact
        assert sl.set.pieces == ((0, 0.2, 0.8),)

    def test_t_zero_returns_support(self):
        m = Interval(1.0)
        K = iset(m, [(0.4, 0.6)])
        assert causal_slice(m, K, 0.0).set.pieces == K.pieces

    def test_negative_time_symmetry(self):
        m = HalfLine()
        K = iset(m, [(1.0, 2.0)])
        sl = causal_slice(m, K, -0.5)
        assert sl.set.pieces == ((0, 0.5, 2.5),)
        assert sl.set.pieces == causal_slice(m, K, 0.5).set.pieces


class TestCausalWindow:
    def test_circle_complete(self):
        m = Circle(2 * math.pi)
        assert t_infinity(m, iset(m, [(1.0, 2.0)])) == math.inf

    def test_interval_smallest_edge_distance(self):
        # oracle: scan radii for loss of compactness
        m = Interval(1.0)
        K = iset(m, [(0.4, 0.6)])
        assert t_infinity(m, K) == pytest.approx(0.4, abs=1e-15)
        radii = [0.05 * i for i in range(1, 12)]
        compact = [closed_neighborhood(m, K, r).compact for r in radii]
        boundary = max(r for r, c in zip(radii, compact) if c)
        assert boundary < 0.4 <= boundary + 0.05 + 1e-12

    def test_half_line_distance_to_origin(self):
        m = HalfLine()
        assert t_infinity(m, iset(m, [(1.0, 2.0)])) == pytest.approx(1.0)

    def test_boundary_touching_rejected(self):
        m = Interval(1.0)
        with pytest.raises(ValueError):
            t_infinity(m, iset(m, [(0.0, 0.5)]))

    def test_ladder_values(self):
        m = Interval(1.0)
        K = iset(m, [(0.4, 0.6)])
        assert t_ladder(m, K, 0) == 0.0
        assert t_ladder(m, K, 1) == pytest.approx(0.2)
        assert t_ladder(m, K, 3) == pytest.approx(0.35)

    def test_ladder_infinite_sentinel(self):
        m = Circle(2 * math.pi)
        K = iset(m, [(1.0, 2.0)])
        assert t_ladder(m, K, 0) == 0.0
        assert t_ladder(m, K, 4) == math.inf

    def test_ladder_monotone_to_limit(self):
        w = causal_window(Interval(1.0), iset(Interval(1.0), [(0.4, 0.6)]))
        vals = [w.ladder(n) for n in range(12)]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        assert all(v < w.t_infinity for v in vals)
        assert vals[-1] == pytest.approx(w.t_infinity, rel=1e-3)


class TestCauchyDevelopment:
    def test_interval_membership(self):
        m = Interval(1.0)
        assert in_cauchy_development(m, 0.2, 0.5)
        assert not in_cauchy_development(m, 0.6, 0.5)

    def test_circle_always(self):
        assert in_cauchy_development(Circle(2 * math.pi), 100.0, 1.0)

    def test_time_reflection_symmetric(self):
        m = Interval(1.0)
        for t, x in [(0.2, 0.5), (0.45, 0.5), (0.3, 0.35)]:
            assert in_cauchy_development(m, t, x) == in_cauchy_development(m, -t, x)


interval_pairs = st.tuples(
    st.floats(min_value=0.05, max_value=0.9), st.floats(min_value=0.01, max_value=0.08)
)


@settings(max_examples=40, deadline=None)
@given(interval_pairs, st.floats(min_value=0.0, max_value=0.3), st.floats(min_value=0.0, max_value=0.3))
def test_growth_monotone_and_semigroup(ck, t1, t2):
    center, half = ck
    m = Interval(2.0)
    lo, hi = max(1e-3, center - half), min(2.0 - 1e-3, center + half)
    K = SpatialSet.from_intervals(m, [(lo, hi)])
    small = closed_neighborhood(m, K, min(t1, t2)).set
    large = closed_neighborhood(m, K, max(t1, t2)).set
    for _, lo_p, hi_p in small.pieces:
        assert large.contains(lo_p, tol=1e-12) and large.contains(hi_p, tol=1e-12)
    # semigroup within the compact regime
    step1, c1 = closed_neighborhood(m, K, t1)
    if c1:
        two_step, _ = closed_neighborhood(m, step1, t2)
        direct, _ = closed_neighborhood(m, K, t1 + t2)
        assert len(two_step.pieces) == len(direct.pieces)
        for a, b in zip(two_step.pieces, direct.pieces):
            assert a[1] == pytest.approx(b[1], abs=1e-12)
            assert a[2] == pytest.approx(b[2], abs=1e-12)
