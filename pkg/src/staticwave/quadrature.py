"""Composite Gauss-Legendre quadrature helpers.

All integrals in the package run through these rules: 32-node panels whose
size is capped both by a fraction of the domain and by the oscillation
wavelength of the integrand, which keeps trig/hyperbolic integrands at
machine accuracy.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

__all__ = ["panel_rule", "piecewise_rule", "oscillation_panels"]

DEFAULT_DEGREE = 32
# phase advance per panel that a 32-node rule resolves to ~1e-15
# (measured: machine-exact through ~60 rad, degrading past 65)
_MAX_PHASE_PER_PANEL = 40.0


@lru_cache(maxsize=8)
def _gauss(deg: int):
    x, w = roots_legendre(deg)
    return x, w


def oscillation_panels(lo: float, hi: float, wavenumber: float, base: int = 1) -> int:
    """Panel count needed so each panel sees a bounded phase advance."""
    span = hi - lo
    if span <= 0:
        return base
    need = int(np.ceil(abs(wavenumber) * span / _MAX_PHASE_PER_PANEL))
    return max(base, need)


def panel_rule(lo: float, hi: float, panels: int, deg: int = DEFAULT_DEGREE):
    """Nodes and weights of a composite Gauss-Legendre rule on [lo, hi]."""
    if hi <= lo:
        return np.empty(0), np.empty(0)
    xg, wg = _gauss(deg)
    edges = np.linspace(lo, hi, panels + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    halves = 0.5 * (edges[1:] - edges[:-1])
    xs = (mids[:, None] + halves[:, None] * xg[None, :]).ravel()
    ws = (halves[:, None] * wg[None, :]).ravel()
    return xs, ws


def piecewise_rule(
    pieces,
    max_panel: float,
    wavenumber: float = 0.0,
    deg: int = DEFAULT_DEGREE,
    min_panels: int = 8,
):
    """Composite rule over a list of (lo, hi) pieces.

    Panels are sized at most `max_panel`, refined further when `wavenumber`
    indicates oscillation, and never fewer than `min_panels` per piece.
    """
    xs, ws = [], []
    for lo, hi in pieces:
        if hi <= lo:
            continue
        panels = max(
            int(np.ceil((hi - lo) / max_panel)),
            oscillation_panels(lo, hi, wavenumber),
            min_panels,
        )
        x, w = panel_rule(lo, hi, panels, deg)
        xs.append(x)
        ws.append(w)
    if not xs:
        return np.empty(0), np.empty(0)
    return np.concatenate(xs), np.concatenate(ws)
