"""Independent leapfrog reference solver.

A three-level explicit scheme on a uniform grid, second order in space and
time, with the catalog boundary conditions enforced through centered ghost
points (a 2x2 linear solve when the conditions couple both endpoints).
The spectral solver is the precision reference; this one exists to be
independent of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .evolution import CauchyData, FieldState
from .extensions import (
    DirectSum,
    Extension,
    HalfLineRobin,
    IntervalDirichlet,
    IntervalFirstKind,
    IntervalSecondKind,
    MassShift,
)
from .geometry import Circle, HalfLine, Interval, Manifold, component_count

__all__ = [
    "FDGrid",
    "CourantError",
    "GhostSingularError",
    "fd_evolve",
    "convergence_order",
    "discrete_energy",
    "truncation_span",
]


class CourantError(ValueError):
    """Time step violates the stability bound k/h <= 0.9."""


class GhostSingularError(ValueError):
    """Boundary parameters make the ghost-point system singular."""


@dataclass(frozen=True)
class FDGrid:
    """Uniform grid: spacing h and Courant ratio k/h (stability needs <= 0.9)."""

    spacing: float
    courant: float = 0.9

    def __post_init__(self):
        if self.spacing <= 0:
            raise ValueError("spacing must be positive")
        if not 0 < self.courant <= 0.9:
            raise CourantError(f"courant ratio {self.courant} outside (0, 0.9]")


def _unwrap_mass(ext: Extension) -> tuple[Extension, float]:
    mu = 0.0
    while isinstance(ext, MassShift):
        mu += ext.mu
        ext = ext.inner
    return ext, mu


def truncation_span(ext: Extension, support_hi: float, t_final: float, tol: float = 1e-9) -> float:
    """Right wall position for a truncated half-line run.

    Far enough that neither the light cone nor a bound-state tail (which
    grows like cosh(kappa t) while decaying like exp(-kappa x)) reaches the
    wall at more than `tol`.
    """
    base, _ = _unwrap_mass(ext)
    span = support_hi + t_final + 2.0
    if isinstance(base, HalfLineRobin) and base.alpha < 0:
        kappa = -1.0 / math.tan(base.alpha)
        span = max(span, support_hi + t_final + math.log(1.0 / tol) / kappa)
    return span


def _grid_nodes(m: Manifold, h: float, span: float | None):
    """(x_nodes, kind) with kind in {interval, circle, halfline}."""
    if isinstance(m, Interval):
        n = max(4, round(m.length / h))
        return np.linspace(0.0, m.length, n + 1), "interval"
    if isinstance(m, Circle):
        n = max(4, round(m.circumference / h))
        return np.linspace(0.0, m.circumference, n, endpoint=False), "circle"
    if span is None:
        raise ValueError("half-line runs need a truncation span")
    n = max(4, round(span / h))
    return np.linspace(0.0, span, n + 1), "halfline"


class _Boundary:
    """Ghost-point boundary handling for one connected component."""

    def __init__(self, base: Extension, kind: str, h: float):
        self.base = base
        self.kind = kind
        self.h = h
        self.pin_lo = False
        self.pin_hi = False
        self.mode = "none"
        if kind == "circle":
            self.mode = "periodic"
        elif isinstance(base, IntervalDirichlet):
            self.pin_lo = self.pin_hi = True
        elif isinstance(base, IntervalFirstKind):
            self.mode = "explicit"
        elif isinstance(base, HalfLineRobin):
            self.pin_hi = True  # truncation wall
            if base.alpha == 0.0:
                self.pin_lo = True
            else:
                self.mode = "explicit"
        elif isinstance(base, IntervalSecondKind):
            if abs(base.w1) < 1e-14:
                self.pin_lo = True  # w2 phi(0) = 0
                self.mode = "explicit"
            elif abs(base.w2) < 1e-14:
                self.pin_hi = True  # w1 phi(a) = 0
                self.mode = "explicit"
            else:
                self.mode = "coupled"
        else:
            raise TypeError(f"finite differences not defined for {type(base).__name__}")

    def explicit_ghosts(self, phi: np.ndarray) -> tuple[complex, complex]:
        """(g_lo, g_hi) when each condition fixes its own ghost."""
        h, base = self.h, self.base
        if isinstance(base, IntervalFirstKind):
            g_lo = phi[1] - 2 * h * (base.theta11 * phi[0] + base.theta12 * phi[-1])
            g_hi = phi[-2] - 2 * h * (np.conj(base.theta12) * phi[0] + base.theta22 * phi[-1])
            return g_lo, g_hi
        if isinstance(base, HalfLineRobin):
            cot = math.cos(base.alpha) / math.sin(base.alpha)
            return phi[1] - 2 * h * cot * phi[0], 0.0
        if isinstance(base, IntervalSecondKind):
            # one end pinned; the derivative row reduces to a Robin-type ghost
            if self.pin_lo:
                return 0.0, phi[-2] - 2 * h * base.theta * phi[-1]
            return phi[1] - 2 * h * base.theta * phi[0], 0.0
        raise TypeError(type(base).__name__)

    def coupled_ghosts(self, phi: np.ndarray, q_over_h2: float, base_lo: complex, base_hi: complex):
        """Solve the 2x2 system for second-kind couplings.

        Row 1 enforces the derivative condition at the current level; row 2
        keeps the next-level boundary values on the (w1, w2) ray, where
        next = base + q_over_h2 * ghost.
        """
        base = self.base
        h = self.h
        w1, w2, th = base.w1, base.w2, base.theta
        a11, a12 = np.conj(w1) / (2 * h), np.conj(w2) / (2 * h)
        b1 = (
            np.conj(w1) * (phi[1] / (2 * h) - th * phi[0])
            + np.conj(w2) * (phi[-2] / (2 * h) - th * phi[-1])
        )
        a21, a22 = w2 * q_over_h2, -w1 * q_over_h2
        b2 = w1 * base_hi - w2 * base_lo
        det = a11 * a22 - a12 * a21
        if abs(det) < 1e-300:
            raise GhostSingularError("second-kind ghost system is singular")
        g_lo = (b1 * a22 - a12 * b2) / det
        g_hi = (a11 * b2 - b1 * a21) / det
        return g_lo, g_hi


def _component_run(base, mu, xs, kind, phi0, dot0, abs_times, grid: FDGrid):
    """Leapfrog one connected component forward; abs_times sorted, >= 0."""
    h = float(xs[1] - xs[0])
    bc = _Boundary(base, kind, h)
    t_final = float(abs_times[-1])
    results: list = [None] * len(abs_times)
    if t_final == 0.0:
        for i in range(len(abs_times)):
            results[i] = (phi0.copy(), dot0.copy())
        return results

    m_out = max(len(abs_times) - 1, 1)
    steps = max(1, int(math.ceil(t_final / (grid.courant * h))))
    steps = ((steps + m_out - 1) // m_out) * m_out
    k = t_final / steps
    k2 = k * k
    out_idx: dict[int, int] = {}
    for i, t in enumerate(abs_times):
        n = int(round(t / k))
        if abs(n * k - t) > 1e-9 * max(1.0, t_final):
            raise ValueError("output times must lie on a common uniform grid")
        out_idx[n] = i

    def interior_next(cur, prev):
        if kind == "circle":
            lap = (np.roll(cur, -1) - 2 * cur + np.roll(cur, 1)) / (h * h)
        else:
            lap = np.zeros_like(cur)
            lap[1:-1] = (cur[2:] - 2 * cur[1:-1] + cur[:-2]) / (h * h)
        return 2 * cur - prev + k2 * (lap - mu * cur)

    def edge_base(cur, prev, idx):
        nb = cur[1] if idx == 0 else cur[-2]
        return 2 * cur[idx] - prev[idx] + k2 * ((nb - 2 * cur[idx]) / (h * h) - mu * cur[idx])

    def fix_edges(nxt, cur, prev):
        if kind == "circle":
            return nxt
        if bc.pin_lo:
            nxt[0] = 0.0
        if bc.pin_hi:
            nxt[-1] = 0.0
        if bc.mode == "explicit":
            g_lo, g_hi = bc.explicit_ghosts(cur)
            if not bc.pin_lo:
                nxt[0] = edge_base(cur, prev, 0) + (k2 / (h * h)) * g_lo
            if not bc.pin_hi:
                nxt[-1] = edge_base(cur, prev, -1) + (k2 / (h * h)) * g_hi
        elif bc.mode == "coupled":
            b_lo = edge_base(cur, prev, 0)
            b_hi = edge_base(cur, prev, -1)
            g_lo, g_hi = bc.coupled_ghosts(cur, k2 / (h * h), b_lo, b_hi)
            nxt[0] = b_lo + (k2 / (h * h)) * g_lo
            nxt[-1] = b_hi + (k2 / (h * h)) * g_hi
        return nxt

    # Taylor seed for the first level
    if kind == "circle":
        lap0 = (np.roll(phi0, -1) - 2 * phi0 + np.roll(phi0, 1)) / (h * h)
    else:
        lap0 = np.zeros_like(phi0)
        lap0[1:-1] = (phi0[2:] - 2 * phi0[1:-1] + phi0[:-2]) / (h * h)
        if bc.mode == "explicit":
            g_lo, g_hi = bc.explicit_ghosts(phi0)
            if not bc.pin_lo:
                lap0[0] = (phi0[1] - 2 * phi0[0] + g_lo) / (h * h)
            if not bc.pin_hi:
                lap0[-1] = (g_hi - 2 * phi0[-1] + phi0[-2]) / (h * h)
    cur = phi0 + k * dot0 + 0.5 * k2 * (lap0 - mu * phi0)
    if kind != "circle" and bc.mode == "coupled":
        q = 0.5 * k2 / (h * h)
        b_lo = phi0[0] + k * dot0[0] + 0.5 * k2 * ((phi0[1] - 2 * phi0[0]) / (h * h) - mu * phi0[0])
        b_hi = phi0[-1] + k * dot0[-1] + 0.5 * k2 * ((phi0[-2] - 2 * phi0[-1]) / (h * h) - mu * phi0[-1])
        g_lo, g_hi = bc.coupled_ghosts(phi0, q, b_lo, b_hi)
        cur[0] = b_lo + q * g_lo
        cur[-1] = b_hi + q * g_hi
    if kind != "circle":
        if bc.pin_lo:
            cur[0] = 0.0
        if bc.pin_hi:
            cur[-1] = 0.0

    if 0 in out_idx:
        results[out_idx[0]] = (phi0.copy(), dot0.copy())
    prev = phi0.copy()
    for n in range(1, steps + 1):
        nxt = interior_next(cur, prev)
        nxt = fix_edges(nxt, cur, prev)
        if n in out_idx:
            results[out_idx[n]] = (cur.copy(), (nxt - prev) / (2 * k))
        prev, cur = cur, nxt
    return results


def fd_evolve(
    m: Manifold,
    ext: Extension,
    data: CauchyData,
    times,
    grid: FDGrid,
    span: float | None = None,
) -> list[FieldState]:
    """Leapfrog evolution sampled at the requested times.

    Times must share a sign (run forward and backward separately); backward
    runs flip the velocity.  Half-line components run on a truncated domain
    with a far Dirichlet wall (see `truncation_span`).  Returned grids
    include the boundary nodes of the discretization.
    """
    times = np.asarray(times, dtype=float)
    if len(times) == 0:
        return []
    if times.min() < 0 < times.max():
        raise ValueError("run forward and backward separately")
    sign = -1.0 if times.min() < 0 else 1.0
    order = np.argsort(np.abs(times))
    abs_sorted = np.abs(times)[order]
    if np.any(np.diff(abs_sorted) <= 0):
        raise ValueError("duplicate output times")

    base_all, mu_all = _unwrap_mass(ext)
    n_comp = component_count(m)
    comp_results = []
    comp_grids = []
    for comp in range(n_comp):
        if isinstance(base_all, DirectSum):
            base, mu = _unwrap_mass(base_all.components[comp])
            mu += mu_all
            m_c: Manifold = HalfLine()
        else:
            base, mu, m_c = base_all, mu_all, m
        span_c = span
        if span_c is None and not isinstance(m_c, (Interval, Circle)):
            if data.support is not None:
                hi = max((p_hi for c, _, p_hi in data.support.pieces if c == comp), default=1.0)
            else:
                hi = float(data.grids[comp][-1])
            span_c = truncation_span(base, hi, float(abs_sorted[-1]))
        xs, kind = _grid_nodes(m_c, grid.spacing, span_c)
        phi0 = np.asarray(data.phi0_fn(comp, xs), dtype=complex) if data.phi0_fn else np.zeros(len(xs), complex)
        dot0 = np.asarray(data.phidot0_fn(comp, xs), dtype=complex) if data.phidot0_fn else np.zeros(len(xs), complex)
        comp_results.append(
            _component_run(base, mu, xs, kind, phi0, sign * dot0, abs_sorted, grid)
        )
        comp_grids.append(xs)

    states: list[FieldState | None] = [None] * len(times)
    for pos, i_orig in enumerate(order):
        phi = tuple(comp_results[c][pos][0] for c in range(n_comp))
        dot = tuple(sign * comp_results[c][pos][1] for c in range(n_comp))
        states[i_orig] = FieldState(float(times[i_orig]), tuple(comp_grids), phi, dot)
    return states  # type: ignore[return-value]


def discrete_energy(state: FieldState, mu: float = 0.0, circle: bool = False) -> float:
    """Grid energy sum_i h (|phidot|^2 + |dphi/dx|^2 + mu |phi|^2)."""
    total = 0.0
    for g, phi, dot in zip(state.grids, state.phi, state.phidot):
        h = float(g[1] - g[0])
        if circle:
            dphi = (np.roll(phi, -1) - phi) / h
            total += h * float(np.sum(np.abs(dot) ** 2 + np.abs(dphi) ** 2 + mu * np.abs(phi) ** 2))
        else:
            dphi = np.diff(phi) / h
            total += h * (
                float(np.sum(np.abs(dot[1:-1]) ** 2))
                + float(np.sum(np.abs(dphi) ** 2))
                + mu * float(np.sum(np.abs(phi[1:-1]) ** 2))
            )
    return total


def convergence_order(errors: dict[float, float]) -> float:
    """Least-squares slope of log(error) against log(h)."""
    hs = np.array(sorted(errors))
    es = np.array([max(errors[h], 1e-300) for h in hs])
    slope, _ = np.polyfit(np.log(hs), np.log(es), 1)
    return float(slope)
