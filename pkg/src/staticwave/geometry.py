"""Flat 1D spatial geometry and the causal-window calculus.

Supported base manifolds: a circle of given circumference, the open
half-line (0, inf), the open interval (0, a), and finite disjoint unions
of half-lines.  Spatial sets are kept as exact sorted interval lists, so
light-cone slices, compactness decisions and domain-of-dependence tests
carry no sampling error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

__all__ = [
    "Circle",
    "HalfLine",
    "Interval",
    "DisjointHalfLines",
    "Manifold",
    "SpatialSet",
    "CausalWindow",
    "GrownSet",
    "CausalSlice",
    "distance",
    "closed_neighborhood",
    "causal_slice",
    "t_infinity",
    "t_ladder",
    "causal_window",
    "in_cauchy_development",
]

# Slack used when deciding whether a closed set stays strictly inside an
# open boundary.  Interval arithmetic here is exact up to float rounding.
_EDGE_TOL = 1e-12


@dataclass(frozen=True)
class Circle:
    """Circle of given circumference, coordinates in [0, L)."""

    circumference: float

    def __post_init__(self):
        if not self.circumference > 0:
            raise ValueError(f"circumference must be positive, got {self.circumference}")


@dataclass(frozen=True)
class HalfLine:
    """Open half-line (0, inf)."""


@dataclass(frozen=True)
class Interval:
    """Open interval (0, a)."""

    length: float

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError(f"length must be positive, got {self.length}")


@dataclass(frozen=True)
class DisjointHalfLines:
    """Finite disjoint union of open half-lines, components 0..count-1."""

    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")


Manifold = Circle | HalfLine | Interval | DisjointHalfLines


def component_count(m: Manifold) -> int:
    return m.count if isinstance(m, DisjointHalfLines) else 1


def coordinate_sup(m: Manifold) -> float:
    """Upper end of the coordinate range of one component (inf if unbounded)."""
    if isinstance(m, Circle):
        return m.circumference
    if isinstance(m, Interval):
        return m.length
    return math.inf


def _as_point(m: Manifold, p) -> tuple[int, float]:
    if isinstance(p, tuple):
        comp, x = p
    else:
        comp, x = 0, float(p)
    if comp < 0 or comp >= component_count(m):
        raise ValueError(f"component {comp} out of range for {m}")
    if isinstance(m, Circle):
        x = x % m.circumference
    return comp, float(x)


class GrownSet(NamedTuple):
    set: "SpatialSet"
    compact: bool


class CausalSlice(NamedTuple):
    set: "SpatialSet"
    compact: bool  # False means the metric-ball identity is not guaranteed


@dataclass(frozen=True)
class SpatialSet:
    """Finite union of closed intervals, normalized and sorted.

    Pieces are (component, lo, hi) triples.  On the circle lo lies in
    [0, L) and hi may exceed L by up to the circumference, which encodes a
    wrapping arc; a full circle is (0, 0, L).
    """

    manifold: Manifold
    pieces: tuple[tuple[int, float, float], ...]

    @staticmethod
    def from_intervals(
        manifold: Manifold,
        intervals,
        component: int = 0,
        strict_interior: bool = False,
    ) -> "SpatialSet":
        """Build a set from (lo, hi) pairs or (component, lo, hi) triples."""
        raw = []
        for item in intervals:
            if len(item) == 3:
                comp, lo, hi = item
            else:
                comp, (lo, hi) = component, item
            if hi < lo:
                raise ValueError(f"interval ({lo}, {hi}) is reversed")
            raw.append((int(comp), float(lo), float(hi)))
        pieces = _normalize(manifold, raw)
        out = SpatialSet(manifold, pieces)
        if strict_interior and not out.is_strictly_interior():
            raise ValueError("set touches or crosses the open boundary")
        return out

    def is_empty(self) -> bool:
        return not self.pieces

    def is_strictly_interior(self) -> bool:
        """True if every piece stays strictly inside open boundaries."""
        if isinstance(self.manifold, Circle):
            return all(hi - lo < self.manifold.circumference - _EDGE_TOL for _, lo, hi in self.pieces)
        sup = coordinate_sup(self.manifold)
        for _, lo, hi in self.pieces:
            if lo <= _EDGE_TOL or (math.isfinite(sup) and hi >= sup - _EDGE_TOL):
                return False
        return True

    def measure(self) -> float:
        return sum(hi - lo for _, lo, hi in self.pieces)

    def contains(self, p, tol: float = 0.0) -> bool:
        comp, x = _as_point(self.manifold, p)
        L = self.manifold.circumference if isinstance(self.manifold, Circle) else None
        for c, lo, hi in self.pieces:
            if c != comp:
                continue
            if L is not None:
                if (x - lo) % L <= (hi - lo) + tol:
                    return True
            elif lo - tol <= x <= hi + tol:
                return True
        return False

    def grow(self, t: float) -> "SpatialSet":
        """Closed t-neighborhood before clipping (may stick out of range)."""
        if t < 0:
            raise ValueError("growth radius must be >= 0")
        grown = [(c, lo - t, hi + t) for c, lo, hi in self.pieces]
        return SpatialSet(self.manifold, _normalize(self.manifold, grown, clip=True))

    def complement_pieces(self, upper: float | None = None):
        """Open-complement intervals per component, bounded above by `upper`."""
        sup = coordinate_sup(self.manifold)
        if upper is None:
            if not math.isfinite(sup):
                raise ValueError("unbounded complement requires an explicit upper bound")
            upper = sup
        out = []
        if isinstance(self.manifold, Circle):
            L = self.manifold.circumference
            # split wrapping arcs at 0/L, then take the linear complement
            flat = []
            for _, lo, hi in self.pieces:
                if hi <= L:
                    flat.append((lo, hi))
                else:
                    flat.append((lo, L))
                    flat.append((0.0, hi - L))
            flat.sort()
            cursor = 0.0
            for lo, hi in flat:
                if lo - cursor > _EDGE_TOL:
                    out.append((0, cursor, lo))
                cursor = max(cursor, hi)
            if L - cursor > _EDGE_TOL:
                out.append((0, cursor, L))
            return out
        for comp in range(component_count(self.manifold)):
            cursor = 0.0
            for c, lo, hi in self.pieces:
                if c != comp:
                    continue
                if lo - cursor > _EDGE_TOL:
                    out.append((comp, cursor, min(lo, upper)))
                cursor = max(cursor, hi)
            if upper - cursor > _EDGE_TOL:
                out.append((comp, cursor, upper))
        return out

    def bounds(self, comp: int = 0) -> tuple[float, float]:
        pcs = [(lo, hi) for c, lo, hi in self.pieces if c == comp]
        if not pcs:
            raise ValueError(f"set has no pieces on component {comp}")
        return min(p[0] for p in pcs), max(p[1] for p in pcs)


def _normalize(m: Manifold, raw, clip: bool = False):
    """Sort, clip to the coordinate range and merge overlapping pieces."""
    if isinstance(m, Circle):
        return _normalize_circle(m.circumference, raw)
    sup = coordinate_sup(m)
    cleaned = []
    for comp, lo, hi in raw:
        if clip:
            lo, hi = max(lo, 0.0), min(hi, sup)
        if hi < lo:
            continue
        cleaned.append((comp, lo, hi))
    cleaned.sort()
    merged: list[list[float]] = []
    for comp, lo, hi in cleaned:
        if merged and merged[-1][0] == comp and lo <= merged[-1][2] + _EDGE_TOL:
            merged[-1][2] = max(merged[-1][2], hi)
        else:
            merged.append([comp, lo, hi])
    return tuple((int(c), lo, hi) for c, lo, hi in merged)


def _normalize_circle(L: float, raw):
    arcs = []
    for _, lo, hi in raw:
        if hi - lo >= L:
            return ((0, 0.0, L),)
        lo_m = lo % L
        arcs.append((lo_m, lo_m + (hi - lo)))
    arcs.sort()
    merged: list[list[float]] = []
    for lo, hi in arcs:
        if merged and lo <= merged[-1][1] + _EDGE_TOL:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    # join a trailing arc that wraps past L with the leading arc
    if len(merged) > 1 and merged[-1][1] >= L and merged[-1][1] - L >= merged[0][0] - _EDGE_TOL:
        merged[0][0] = merged[-1][0]
        merged[0][1] = max(merged[0][1] + L, merged[-1][1])
        merged.pop()
        if merged[0][1] - merged[0][0] >= L:
            return ((0, 0.0, L),)
        merged.sort()
    if len(merged) == 1 and merged[0][1] - merged[0][0] >= L:
        return ((0, 0.0, L),)
    return tuple((0, lo, hi) for lo, hi in merged)


@dataclass(frozen=True)
class CausalWindow:
    """t_infinity and the dyadic approach ladder for a data-support set."""

    t_infinity: float

    def ladder(self, n: int) -> float:
        if n < 0:
            raise ValueError("ladder index must be >= 0")
        if n == 0:
            return 0.0
        if math.isinf(self.t_infinity):
            return math.inf
        return (1.0 - 0.5**n) * self.t_infinity


def distance(m: Manifold, p, q) -> float:
    """Path-metric distance; inf for points on distinct components."""
    (cp, x), (cq, y) = _as_point(m, p), _as_point(m, q)
    if cp != cq:
        return math.inf
    if isinstance(m, Circle):
        d = abs(x - y) % m.circumference
        return min(d, m.circumference - d)
    return abs(x - y)


def closed_neighborhood(m: Manifold, K: SpatialSet, t: float) -> GrownSet:
    """C(K, t) clipped to the manifold, with its compactness in the open space."""
    if t < 0:
        raise ValueError("radius must be >= 0")
    if K.manifold != m:
        raise ValueError("set belongs to a different manifold")
    if isinstance(m, Circle):
        return GrownSet(K.grow(t), compact=True)
    grown = K.grow(t)
    sup = coordinate_sup(m)
    compact = True
    for comp, lo, hi in K.pieces:
        if lo - t <= _EDGE_TOL:
            compact = False
        if math.isfinite(sup) and hi + t >= sup - _EDGE_TOL:
            compact = False
    return GrownSet(grown, compact)


def causal_slice(m: Manifold, K: SpatialSet, t: float) -> CausalSlice:
    """J(K) intersected with the time-t slice.

    Equals the metric ball C(K, |t|) whenever that ball is compact; when it
    is not, the clipped ball is returned with compact=False, meaning the
    identity with the causal slice is not guaranteed.
    """
    grown, compact = closed_neighborhood(m, K, abs(t))
    return CausalSlice(grown, compact)


def t_infinity(m: Manifold, K: SpatialSet) -> float:
    """Largest time (sup) up to which the causal slice of K stays compact."""
    if K.manifold != m:
        raise ValueError("set belongs to a different manifold")
    if K.is_empty():
        raise ValueError("data support is empty")
    if not K.is_strictly_interior():
        raise ValueError("data support must be strictly interior")
    if isinstance(m, Circle):
        return math.inf
    sup = coordinate_sup(m)
    t = math.inf
    for comp in range(component_count(m)):
        try:
            lo, hi = K.bounds(comp)
        except ValueError:
            continue
        t = min(t, lo)
        if math.isfinite(sup):
            t = min(t, sup - hi)
    return t


def t_ladder(m: Manifold, K: SpatialSet, n: int) -> float:
    """n-th rung (1 - 2^-n) * t_infinity of the approach ladder; t_0 = 0."""
    return causal_window(m, K).ladder(n)


def causal_window(m: Manifold, K: SpatialSet) -> CausalWindow:
    return CausalWindow(t_infinity(m, K))


def in_cauchy_development(m: Manifold, t: float, p) -> bool:
    """True iff the closed ball around p of radius |t| is compact in the manifold."""
    comp, x = _as_point(m, p)
    if isinstance(m, Circle):
        return True
    point = SpatialSet.from_intervals(m, [(comp, x, x)])
    if not point.is_strictly_interior():
        raise ValueError("point must be interior")
    return closed_neighborhood(m, point, abs(t)).compact
