"""Spectra, eigenfunctions, resolvent kernels and spectral densities.

Everything is organized around two entire functions of the spectral
parameter,

    CS(lam; u) = cos(sqrt(lam) u)          (cosh branch for lam < 0)
    SN(lam; u) = sin(sqrt(lam) u)/sqrt(lam) (sinh branch, -> u at lam = 0),

which are even in sqrt(lam).  Writing the transcendental eigenvalue
conditions and resolvent kernels in terms of CS/SN removes every square
root of the spectral parameter, so all formulas are analytic across
lam = 0 and manifestly independent of the branch choice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .extensions import (
    CircleClosure,
    DirectSum,
    Extension,
    HalfLineRobin,
    IntervalDirichlet,
    IntervalFirstKind,
    IntervalSecondKind,
    MassShift,
)
from .geometry import Circle, DisjointHalfLines, HalfLine, Interval, Manifold
from .quadrature import oscillation_panels, panel_rule, piecewise_rule

__all__ = [
    "ModeFunction",
    "EigenLine",
    "ContinuumBlock",
    "SpectralData",
    "GreensEvaluation",
    "GreensPoleError",
    "RootIsolationError",
    "eigenvalue_condition",
    "zero_in_spectrum",
    "find_eigenvalues",
    "negative_eigenvalues",
    "eigenfunction",
    "eigenmodes",
    "build_spectral_data",
    "greens_function",
    "resolvent_apply",
    "continuum_density",
    "spectral_density_closed",
    "continuum_block",
    "continuum_mode_values",
    "mode_trace",
    "nearest_eigenvalue",
]

_REFINE_REL = 1e-12  # eigenvalue refinement target: |dlam| <= 1e-12 max(1, |lam|)


class GreensPoleError(ValueError):
    """Resolvent evaluated at (or numerically on) the spectrum."""

    def __init__(self, lam, nearest=None):
        self.lam = lam
        self.nearest = nearest
        msg = f"lambda = {lam} is in the spectrum"
        if nearest is not None:
            msg += f" (nearest eigenvalue {nearest})"
        super().__init__(msg)


class RootIsolationError(RuntimeError):
    """A bracket scan found a suspected root it could not isolate."""

    def __init__(self, lo, hi, detail=""):
        self.bracket = (lo, hi)
        super().__init__(f"could not isolate suspected root in [{lo}, {hi}] {detail}")


# ---------------------------------------------------------------------------
# entire trig helpers


def cs(lam, u):
    """cos(sqrt(lam) u), entire in lam; accepts real scalars/arrays or complex."""
    if np.iscomplexobj(lam) or isinstance(lam, complex):
        return np.cos(np.sqrt(np.asarray(lam, dtype=complex)) * u)
    arr = np.atleast_1d(np.asarray(lam, dtype=float))
    out = np.empty_like(arr)
    pos = arr >= 0
    out[pos] = np.cos(np.sqrt(arr[pos]) * u)
    out[~pos] = np.cosh(np.sqrt(-arr[~pos]) * u)
    return out if np.ndim(lam) else float(out[0])


def sn(lam, u):
    """sin(sqrt(lam) u)/sqrt(lam), entire in lam, equal to u at lam = 0."""
    if np.iscomplexobj(lam) or isinstance(lam, complex):
        arr = np.atleast_1d(np.asarray(lam, dtype=complex))
        small = np.abs(arr) * u * u < 1e-8
        s = np.sqrt(np.where(small, 1.0, arr))
        safe = np.sin(s * u) / s
        series = u * (1 - arr * u * u / 6.0 + (arr * u * u) ** 2 / 120.0)
        out = np.where(small, series, safe)
        return out if np.ndim(lam) else complex(out[0])
    arr = np.atleast_1d(np.asarray(lam, dtype=float))
    out = np.empty_like(arr)
    z = arr * u * u
    small = np.abs(z) < 1e-8
    pos = (arr > 0) & ~small
    neg = (arr < 0) & ~small
    out[pos] = np.sin(np.sqrt(arr[pos]) * u) / np.sqrt(arr[pos])
    out[neg] = np.sinh(np.sqrt(-arr[neg]) * u) / np.sqrt(-arr[neg])
    out[small] = u * (1 - z[small] / 6.0 + z[small] ** 2 / 120.0)
    return out if np.ndim(lam) else float(out[0])


def _sqrt_upper(lam: complex) -> complex:
    """The square root of lam lying in the closed upper half-plane."""
    s = complex(np.sqrt(complex(lam)))
    if s.imag < 0:
        s = -s
    return s


# ---------------------------------------------------------------------------
# mode functions


@dataclass(frozen=True)
class ModeFunction:
    """Closed-form eigenfunction: evaluate with mode(x) on scalars or arrays.

    kinds and coeffs:
      trig        (A, B, k)      A cos(kx) + B sin(kx)
      hyperbolic  (A, B, kappa)  A cosh(kx) + B sinh(kx)
      linear      (A, B)         A + B x
      exp_decay   (C, kappa)     C exp(-kappa x)
      fourier_cos (A, k)         A cos(kx)   (k = 0 gives the constant mode)
      fourier_sin (A, k)         A sin(kx)
    """

    kind: str
    coeffs: tuple
    component: int = 0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "trig":
            A, B, k = self.coeffs
            return A * np.cos(k * x) + B * np.sin(k * x)
        if self.kind == "hyperbolic":
            A, B, k = self.coeffs
            return A * np.cosh(k * x) + B * np.sinh(k * x)
        if self.kind == "linear":
            A, B = self.coeffs
            return A + B * x
        if self.kind == "exp_decay":
            C, k = self.coeffs
            return C * np.exp(-k * x) + 0j
        if self.kind == "fourier_cos":
            A, k = self.coeffs
            return A * np.cos(k * x) + 0j
        if self.kind == "fourier_sin":
            A, k = self.coeffs
            return A * np.sin(k * x) + 0j
        raise ValueError(f"unknown mode kind {self.kind}")

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "trig":
            A, B, k = self.coeffs
            return -A * k * np.sin(k * x) + B * k * np.cos(k * x)
        if self.kind == "hyperbolic":
            A, B, k = self.coeffs
            return A * k * np.sinh(k * x) + B * k * np.cosh(k * x)
        if self.kind == "linear":
            return np.full_like(x, self.coeffs[1], dtype=complex)
        if self.kind == "exp_decay":
            C, k = self.coeffs
            return -k * C * np.exp(-k * x) + 0j
        if self.kind == "fourier_cos":
            A, k = self.coeffs
            return -A * k * np.sin(k * x) + 0j
        if self.kind == "fourier_sin":
            A, k = self.coeffs
            return A * k * np.cos(k * x) + 0j
        raise ValueError(f"unknown mode kind {self.kind}")


def mode_trace(mode: ModeFunction, m: Manifold):
    """BoundaryTrace (values and inward derivatives) of a mode."""
    from .extensions import BoundaryTrace
    from .geometry import coordinate_sup

    a = coordinate_sup(m)
    v0 = complex(np.asarray(mode(0.0)).item())
    d0 = complex(np.asarray(mode.derivative(0.0)).item())
    if not math.isfinite(a):
        return BoundaryTrace(value0=v0, inward0=d0)
    va = complex(np.asarray(mode(a)).item())
    da = complex(np.asarray(mode.derivative(a)).item())
    return BoundaryTrace(value0=v0, value_end=va, inward0=d0, inward_end=-da)


@dataclass(frozen=True)
class EigenLine:
    """One discrete eigenvalue with its orthonormal eigenmode(s)."""

    lam: float
    multiplicity: int
    modes: tuple[ModeFunction, ...]
    flag: str = ""


@dataclass(frozen=True)
class ContinuumBlock:
    """Quadrature discretization of the half-line scattering continuum.

    Nodes are wavenumbers k (lam = k^2); `weights` already contain the
    spectral density factor 2 / (pi (cos^2 a + k^2 sin^2 a)) so that
    sum_j weights[j] |<u_kj, f>|^2 approximates the continuum Parseval mass,
    with u_k(x) = cos(a) sin(kx) + k sin(a) cos(kx).
    """

    alpha: float
    k_nodes: np.ndarray
    weights: np.ndarray
    k_max: float
    component: int = 0

    @property
    def lams(self) -> np.ndarray:
        return self.k_nodes**2


def continuum_mode_values(alpha: float, k, x):
    """Scattering solutions u_k(x) of the Robin half-line, unnormalized."""
    k = np.asarray(k, dtype=float)
    x = np.asarray(x, dtype=float)
    return math.cos(alpha) * np.sin(k * x) + k * math.sin(alpha) * np.cos(k * x)


def continuum_block(alpha: float, k_max: float, x_span: float, component: int = 0) -> ContinuumBlock:
    """Build a continuum quadrature fine enough to evaluate fields over x_span."""
    panels = max(8, oscillation_panels(0.0, k_max, max(x_span, 1.0)))
    k, w = panel_rule(0.0, k_max, panels)
    density = 2.0 / (math.pi * (math.cos(alpha) ** 2 + k**2 * math.sin(alpha) ** 2))
    return ContinuumBlock(alpha, k, w * density, k_max, component)


@dataclass(frozen=True)
class SpectralData:
    """Sorted discrete spectrum plus optional continuum descriptors."""

    manifold: Manifold
    extension: Extension
    lines: tuple[EigenLine, ...]
    continuum: tuple[ContinuumBlock, ...] = field(default=())

    def eigenvalues(self):
        return [line.lam for line in self.lines]

    def basis_modes(self):
        """Flat list of (lam, mode) pairs, one entry per basis mode."""
        out = []
        for line in self.lines:
            for mode in line.modes:
                out.append((line.lam, mode))
        return out


@dataclass(frozen=True)
class GreensEvaluation:
    x: float
    y: float
    lam: complex
    value: complex


# ---------------------------------------------------------------------------
# eigenvalue conditions


def _interval_condition(ext, a: float, lam):
    """Entire, branch-free residual whose zeros are the nonzero point spectrum."""
    c, s = cs(lam, a), sn(lam, a)
    if isinstance(ext, IntervalDirichlet):
        return s
    if isinstance(ext, IntervalFirstKind):
        t11, t22, t12 = ext.theta11, ext.theta22, ext.theta12
        return (t11 + t22) * c - np.asarray(lam) * s + (t11 * t22 - abs(t12) ** 2) * s + 2 * t12.real
    if isinstance(ext, IntervalSecondKind):
        return -c + 2 * (ext.w1 * ext.w2.conjugate()).real - ext.theta * s
    raise TypeError(f"not an interval extension: {ext!r}")


def eigenvalue_condition(m: Manifold, ext: Extension, lam) -> float:
    """Real-analytic residual vanishing exactly on the point spectrum.

    lam < 0 is covered by the hyperbolic continuation of CS/SN.  The
    residual at lam = 0 is meaningful analytically, but membership of 0 is
    decided by `zero_in_spectrum` (the scan never brackets 0).
    """
    if isinstance(ext, MassShift):
        return eigenvalue_condition(m, ext.inner, np.asarray(lam) - ext.mu)
    if isinstance(ext, DirectSum):
        vals = [
            eigenvalue_condition(HalfLine(), comp, lam) for comp in ext.components
        ]
        return np.prod(vals, axis=0)
    if isinstance(ext, CircleClosure):
        return 1.0 - cs(lam, m.circumference)
    if isinstance(ext, HalfLineRobin):
        lam_arr = np.asarray(lam, dtype=float)
        neg = lam_arr <= 0
        out = np.where(
            neg,
            math.cos(ext.alpha) + np.sqrt(np.abs(lam_arr)) * math.sin(ext.alpha),
            np.sqrt(math.cos(ext.alpha) ** 2 + np.abs(lam_arr) * math.sin(ext.alpha) ** 2),
        )
        return out if out.ndim else float(out)
    return _interval_condition(ext, m.length, lam)


def zero_in_spectrum(m: Manifold, ext: Extension) -> bool:
    """Membership of 0 in the point spectrum, by the algebraic criteria."""
    if isinstance(ext, MassShift):
        if ext.mu == 0:
            return zero_in_spectrum(m, ext.inner)
        # 0 is in the shifted spectrum iff -mu is an eigenvalue of the base
        hits = find_eigenvalues(m, ext.inner, -ext.mu - 1e-9, -ext.mu + 1e-9)
        return bool(hits)
    if isinstance(ext, DirectSum):
        return any(zero_in_spectrum(HalfLine(), c) for c in ext.components)
    if isinstance(ext, CircleClosure):
        return True
    if isinstance(ext, (HalfLineRobin, IntervalDirichlet)):
        return False
    a = m.length
    if isinstance(ext, IntervalFirstKind):
        t11, t22, t12 = ext.theta11, ext.theta22, ext.theta12
        crit = a * abs(t12) ** 2 - t11 - a * t11 * t22 - t22 - 2 * t12.real
        return abs(crit) < 1e-12 * max(1.0, abs(t11) + abs(t22) + abs(t12))
    if isinstance(ext, IntervalSecondKind):
        crit = a * ext.theta - 2 * (ext.w1 * ext.w2.conjugate()).real + 1.0
        return abs(crit) < 1e-12 * max(1.0, abs(ext.theta))
    raise TypeError(f"unknown extension {ext!r}")


# ---------------------------------------------------------------------------
# fundamental 2x2 boundary matrix on the interval


def _boundary_matrix(ext, a: float, lam: float) -> np.ndarray:
    """Boundary conditions applied to the fundamental solutions u1, u2.

    u1(x) = CS(lam; x), u2(x) = SN(lam; x) with u1(0)=1, u1'(0)=0,
    u2(0)=0, u2'(0)=1.  An eigenvalue is a lam where the matrix is
    singular; the eigenspace dimension is its nullity.
    """
    c, s = cs(lam, a), sn(lam, a)
    u1a, u2a = c, s
    du1a, du2a = -lam * s, c  # u1' = -lam u2, u2' = u1
    if isinstance(ext, IntervalDirichlet):
        return np.array([[1.0, 0.0], [u1a, u2a]], dtype=complex)
    if isinstance(ext, IntervalFirstKind):
        t11, t22, t12 = ext.theta11, ext.theta22, ext.theta12
        return np.array(
            [
                [t11 + t12 * u1a, -1.0 + t12 * u2a],
                [np.conj(t12) + t22 * u1a + du1a, t22 * u2a + du2a],
            ],
            dtype=complex,
        )
    if isinstance(ext, IntervalSecondKind):
        w1, w2, th = ext.w1, ext.w2, ext.theta
        return np.array(
            [
                [w2 - w1 * u1a, -w1 * u2a],
                [
                    np.conj(w1) * th + np.conj(w2) * (th * u1a + du1a),
                    -np.conj(w1) + np.conj(w2) * (th * u2a + du2a),
                ],
            ],
            dtype=complex,
        )
    raise TypeError(f"not an interval extension: {ext!r}")


def _nullity(mat: np.ndarray, scale: float) -> int:
    svals = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(svals <= 1e-7 * max(scale, 1.0)))


def _null_vectors(mat: np.ndarray, count: int):
    _, _, vh = np.linalg.svd(mat)
    return [vh[-1 - i].conj() for i in range(count)]


# ---------------------------------------------------------------------------
# root scanning


def _bisect(g, lo, hi, iters: int = 200):
    flo = g(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm = g(mid)
        if fm == 0.0:
            return mid
        if (flo < 0) == (fm < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _newton_polish(g, u: float, step: float) -> float:
    h = max(1e-7 * max(abs(u), 1.0), 1e-9)
    d = (g(u + h) - g(u - h)) / (2 * h)
    if d != 0 and math.isfinite(d):
        u_new = u - g(u) / d
        if abs(u_new - u) < step:
            return u_new
    return u


def _scan_sign_roots(g, grid: np.ndarray, vals: np.ndarray):
    roots = []
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            roots.append(grid[i])
        elif a * b < 0:
            u = _bisect(g, grid[i], grid[i + 1])
            roots.append(_newton_polish(g, u, grid[i + 1] - grid[i]))
    if vals[-1] == 0.0:
        roots.append(grid[-1])
    return roots


def _scan_tangential_roots(g, grid: np.ndarray, vals: np.ndarray):
    """Zeros the coarse sign scan cannot see: double roots and tight pairs.

    Each dip of |g| without a coarse sign change is re-sampled on a fine
    subgrid.  A sign-changing lobe there is a near-degenerate pair of
    simple roots (both bisected); no sign change means a candidate double
    zero, located via the sign change of the numerical derivative and
    accepted only when the residual collapses.  A dip whose floor is small
    but does not collapse is an unresolvably tight pair and is reported.
    """
    roots = []
    absv = np.abs(vals)
    for i in range(1, len(grid) - 1):
        if not (absv[i] <= absv[i - 1] and absv[i] <= absv[i + 1]):
            continue
        if vals[i - 1] * vals[i + 1] <= 0:
            continue  # sign change handled elsewhere
        window = absv[max(0, i - 8) : i + 9]
        local = max(1.0, float(np.max(window)))
        if absv[i] > 0.05 * local:
            continue
        lo, hi = grid[i - 1], grid[i + 1]
        sub = np.linspace(lo, hi, 129)
        gs = np.array([g(u) for u in sub])
        noise = 1e-11 * local
        lobe = [
            j
            for j in range(len(sub) - 1)
            if gs[j] * gs[j + 1] < 0 and min(abs(gs[j]), abs(gs[j + 1])) > noise
        ]
        if lobe:
            for j in lobe:
                r = _bisect(g, sub[j], sub[j + 1])
                roots.append(_newton_polish(g, r, sub[j + 1] - sub[j]))
            continue
        # candidate double zero: g' changes sign where g stays one-signed
        j0 = int(np.argmin(np.abs(gs)))
        u0 = float(sub[j0])
        h = 1e-7 * max(1.0, abs(u0))
        dg = lambda u: g(u + h) - g(u - h)
        d_lo, d_hi = max(lo, u0 - 8 * (sub[1] - sub[0])), min(hi, u0 + 8 * (sub[1] - sub[0]))
        if dg(d_lo) * dg(d_hi) < 0:
            u_der = _bisect(dg, d_lo, d_hi)
            if abs(g(u_der)) < abs(g(u0)):
                u0 = u_der
        g0 = g(u0)
        floor = abs(g0)
        # if the extremum value crosses zero against its surroundings, the
        # "double" is really a tight pair of simple roots; bisect both
        if floor > 1e-13 * local and g0 * g(d_lo) < 0 and g0 * g(d_hi) < 0:
            roots.append(_bisect(g, d_lo, u0))
            roots.append(_bisect(g, u0, d_hi))
            continue
        if floor <= 1e-10 * local:
            roots.append(u0)
        elif floor <= 1e-3 * local:
            raise RootIsolationError(lo, hi, f"residual floor {floor:.3e}")
    return roots


def _dedupe(roots, tol):
    out = []
    for r in sorted(roots):
        if not out or r - out[-1] > tol * max(1.0, abs(r)):
            out.append(r)
    return out


def _interval_point_spectrum(m: Interval, ext, lmin: float, lmax: float):
    """All eigenvalues of an interval extension in [lmin, lmax], with multiplicity."""
    a = m.length
    cond = lambda lam: float(np.real(_interval_condition(ext, a, np.asarray(lam, dtype=float))))
    found: list[float] = []

    tangential: set[float] = set()

    if lmax > 0:
        s_hi = math.sqrt(lmax)
        step = math.pi / (8 * a)
        grid = np.arange(step * 1e-3, s_hi + step, step)
        grid = grid[grid <= s_hi + 1e-12]
        g = lambda u: cond(u * u)
        vals = np.array([g(u) for u in grid])
        found.extend(u * u for u in _scan_sign_roots(g, grid, vals))
        for u in _scan_tangential_roots(g, grid, vals):
            found.append(u * u)
            tangential.add(u * u)

    if lmin < 0:
        k_hi = min(math.sqrt(-lmin), 50.0 / a)
        if k_hi > 0:
            grid = np.arange(0.01, k_hi + 0.05, 0.05)
            g = lambda u: cond(-u * u)
            vals = np.array([g(u) for u in grid])
            roots_k = _scan_sign_roots(g, grid, vals) + _scan_tangential_roots(g, grid, vals)
            found.extend(-u * u for u in roots_k[:2])  # at most 2 below zero

    out = []
    for lam in _dedupe(found, 1e-10):
        if lam < lmin - 1e-12 or lam > lmax + 1e-12 or abs(lam) < 1e-10:
            continue
        mat = _boundary_matrix(ext, a, lam)
        scale = float(np.max(np.abs(_boundary_matrix(ext, a, lam + 0.5 * (1 + abs(lam))))))
        mult = max(1, _nullity(mat, scale))
        was_tangential = any(abs(lam - t) <= 1e-9 * max(1.0, abs(lam)) for t in tangential)
        flag = "near-degenerate" if (was_tangential and mult == 1) else ""
        out.append((lam, mult, flag))
    if zero_in_spectrum(m, ext) and lmin <= 0.0 <= lmax:
        mat = _boundary_matrix(ext, a, 0.0)
        mult = max(1, _nullity(mat, 1.0))
        out.append((0.0, mult, ""))
    out.sort()
    return out


def find_eigenvalues(m: Manifold, ext: Extension, lambda_min: float, lambda_max: float, max_count: int | None = None):
    """Sorted (eigenvalue, multiplicity) pairs in [lambda_min, lambda_max].

    Interval families are scanned in s = sqrt(lam) (and kappa = sqrt(-lam)
    for the hyperbolic branch) with bracketing, bisection and a Newton
    polish; 0 is included per the algebraic criteria, never by scanning.
    """
    if lambda_min >= lambda_max:
        raise ValueError("lambda_min must be below lambda_max")
    out: list[tuple[float, int]] = []
    if isinstance(ext, MassShift):
        inner = find_eigenvalues(m, ext.inner, lambda_min - ext.mu, lambda_max - ext.mu, max_count)
        out = [(lam + ext.mu, mult) for lam, mult in inner]
    elif isinstance(ext, DirectSum):
        if not isinstance(m, DisjointHalfLines):
            raise ValueError("direct sums live on disjoint unions of half-lines")
        merged: list[tuple[float, int]] = []
        for comp in ext.components:
            merged.extend(find_eigenvalues(HalfLine(), comp, lambda_min, lambda_max))
        merged.sort()
        for lam, mult in merged:
            if out and abs(lam - out[-1][0]) < 1e-10 * max(1.0, abs(lam)):
                out[-1] = (out[-1][0], out[-1][1] + mult)
            else:
                out.append((lam, mult))
    elif isinstance(ext, CircleClosure):
        L = m.circumference
        n = 0
        while True:
            lam = (2 * math.pi * n / L) ** 2
            if lam > lambda_max:
                break
            if lam >= lambda_min:
                out.append((lam, 1 if n == 0 else 2))
            n += 1
    elif isinstance(ext, HalfLineRobin):
        if ext.alpha < 0:
            lam = -1.0 / math.tan(ext.alpha) ** 2
            if lambda_min <= lam <= lambda_max:
                out.append((lam, 1))
    else:
        if not isinstance(m, Interval):
            raise ValueError(f"{type(ext).__name__} requires an Interval manifold")
        out = [(lam, mult) for lam, mult, _ in _interval_point_spectrum(m, ext, lambda_min, lambda_max)]
    if max_count is not None:
        out = out[:max_count]
    return out


def negative_eigenvalues(m: Manifold, ext: Extension):
    return find_eigenvalues(m, ext, -(50.0 / _length_scale(m)) ** 2, -1e-12)


def _length_scale(m: Manifold) -> float:
    if isinstance(m, Interval):
        return m.length
    if isinstance(m, Circle):
        return m.circumference
    return 1.0


def nearest_eigenvalue(m: Manifold, ext: Extension, x0: float) -> float | None:
    width = max(8.0, 8.0 * (math.pi / _length_scale(m)) ** 2, 2 * abs(x0))
    hits = find_eigenvalues(m, ext, x0 - width, x0 + width)
    if not hits:
        return None
    return min((lam for lam, _ in hits), key=lambda lam: abs(lam - x0))


# ---------------------------------------------------------------------------
# eigenfunctions


def _phase_fix(vec: np.ndarray) -> np.ndarray:
    lead = vec[np.argmax(np.abs(vec))]
    if abs(lead) == 0:
        return vec
    out = vec * (abs(lead) / lead)
    if np.all(np.abs(out.imag) < 1e-14 * np.maximum(np.abs(out.real), 1.0)):
        out = out.real.astype(complex)
    return out


def _trig_norm_sq(A: complex, B: complex, k: float, a: float) -> float:
    ccs = a / 2 + math.sin(2 * k * a) / (4 * k)
    ssn = a / 2 - math.sin(2 * k * a) / (4 * k)
    csn = math.sin(k * a) ** 2 / (2 * k)
    return abs(A) ** 2 * ccs + abs(B) ** 2 * ssn + 2 * (A * np.conj(B)).real * csn


def _hyp_norm_sq(A: complex, B: complex, k: float, a: float) -> float:
    cch = a / 2 + math.sinh(2 * k * a) / (4 * k)
    ssh = -a / 2 + math.sinh(2 * k * a) / (4 * k)
    csh = (math.cosh(2 * k * a) - 1) / (4 * k)
    return abs(A) ** 2 * cch + abs(B) ** 2 * ssh + 2 * (A * np.conj(B)).real * csh


def _linear_norm_sq(A: complex, B: complex, a: float) -> float:
    return (
        abs(A) ** 2 * a
        + 2 * (A * np.conj(B)).real * a * a / 2
        + abs(B) ** 2 * a**3 / 3
    )


def _interval_mode_from_vector(vec: np.ndarray, lam: float, a: float, component: int) -> ModeFunction:
    alpha, beta = complex(vec[0]), complex(vec[1])
    if abs(lam) < 1e-10:
        A, B = alpha, beta
        nrm = math.sqrt(_linear_norm_sq(A, B, a))
        vec2 = _phase_fix(np.array([A / nrm, B / nrm]))
        return ModeFunction("linear", (complex(vec2[0]), complex(vec2[1])), component)
    if lam > 0:
        k = math.sqrt(lam)
        A, B = alpha, beta / k
        nrm = math.sqrt(_trig_norm_sq(A, B, k, a))
        vec2 = _phase_fix(np.array([A / nrm, B / nrm]))
        return ModeFunction("trig", (complex(vec2[0]), complex(vec2[1]), k), component)
    k = math.sqrt(-lam)
    A, B = alpha, beta / k
    nrm = math.sqrt(_hyp_norm_sq(A, B, k, a))
    vec2 = _phase_fix(np.array([A / nrm, B / nrm]))
    return ModeFunction("hyperbolic", (complex(vec2[0]), complex(vec2[1]), k), component)


def _mode_inner_interval(m1: ModeFunction, m2: ModeFunction, a: float) -> complex:
    xs, ws = piecewise_rule([(0.0, a)], a / 64, _mode_wavenumber(m1) + _mode_wavenumber(m2))
    return complex(np.sum(ws * np.conj(m1(xs)) * m2(xs)))


def _mode_wavenumber(mode: ModeFunction) -> float:
    if mode.kind in ("trig", "fourier_cos", "fourier_sin"):
        return float(mode.coeffs[-1])
    return 0.0


def eigenmodes(m: Manifold, ext: Extension, lam: float, component: int = 0):
    """Orthonormal eigenmode tuple at a confirmed eigenvalue."""
    if isinstance(ext, MassShift):
        return eigenmodes(m, ext.inner, lam - ext.mu, component)
    if isinstance(ext, CircleClosure):
        L = m.circumference
        n = round(math.sqrt(max(lam, 0.0)) * L / (2 * math.pi))
        if abs(lam - (2 * math.pi * n / L) ** 2) > 1e-8 * max(1.0, lam):
            raise ValueError(f"{lam} is not a circle eigenvalue")
        if n == 0:
            return (ModeFunction("fourier_cos", (1.0 / math.sqrt(L), 0.0), component),)
        k = 2 * math.pi * n / L
        amp = math.sqrt(2.0 / L)
        return (
            ModeFunction("fourier_cos", (amp, k), component),
            ModeFunction("fourier_sin", (amp, k), component),
        )
    if isinstance(ext, HalfLineRobin):
        if ext.alpha >= 0:
            raise ValueError("no bound state for alpha >= 0")
        kappa = -1.0 / math.tan(ext.alpha)
        if abs(lam + kappa * kappa) > 1e-8 * max(1.0, kappa * kappa):
            raise ValueError(f"{lam} is not the bound-state eigenvalue")
        return (ModeFunction("exp_decay", (math.sqrt(2 * kappa), kappa), component),)
    if isinstance(ext, DirectSum):
        out = []
        for ci, comp in enumerate(ext.components):
            try:
                out.extend(eigenmodes(HalfLine(), comp, lam, ci))
            except ValueError:
                continue
        if not out:
            raise ValueError(f"{lam} is not an eigenvalue of any component")
        return tuple(out)
    if not isinstance(m, Interval):
        raise ValueError(f"{type(ext).__name__} requires an Interval manifold")
    a = m.length
    resid = abs(eigenvalue_condition(m, ext, lam)) if abs(lam) > 1e-10 else (
        0.0 if zero_in_spectrum(m, ext) else 1.0
    )
    if resid > 1e-6 * max(1.0, abs(lam)):
        raise ValueError(f"{lam} is not an eigenvalue (condition residual {resid:.3e})")
    mat = _boundary_matrix(ext, a, lam)
    scale = float(np.max(np.abs(_boundary_matrix(ext, a, lam + 0.5 * (1 + abs(lam))))))
    mult = max(1, _nullity(mat, scale))
    vecs = _null_vectors(mat, mult)
    modes = [_interval_mode_from_vector(np.asarray(v), lam, a, component) for v in vecs]
    if len(modes) == 2:
        # Gram-Schmidt; the pair is orthogonal analytically, this removes roundoff
        inner = _mode_inner_interval(modes[0], modes[1], a)
        if abs(inner) > 1e-13:
            v0 = np.array(modes[0].coeffs[:2])
            v1 = np.array(modes[1].coeffs[:2]) - inner * np.array(modes[0].coeffs[:2])
            kind = modes[1].kind
            tail = modes[1].coeffs[2:]
            raw = ModeFunction(kind, (complex(v1[0]), complex(v1[1])) + tail, component)
            nrm = math.sqrt(abs(_mode_inner_interval(raw, raw, a)))
            modes[1] = ModeFunction(kind, (complex(v1[0] / nrm), complex(v1[1] / nrm)) + tail, component)
    return tuple(modes)


def eigenfunction(m: Manifold, ext: Extension, lam: float, which: int = 0) -> ModeFunction:
    """A single normalized eigenfunction at `lam` (see `eigenmodes` for pairs)."""
    return eigenmodes(m, ext, lam)[which]


# ---------------------------------------------------------------------------
# spectral data assembly


def build_spectral_data(
    m: Manifold,
    ext: Extension,
    max_modes: int = 512,
    lambda_max: float | None = None,
) -> SpectralData:
    """Discrete spectrum up to max_modes basis modes (continuum attached separately)."""
    if isinstance(ext, MassShift):
        base = build_spectral_data(m, ext.inner, max_modes, None if lambda_max is None else lambda_max - ext.mu)
        lines = tuple(
            EigenLine(line.lam + ext.mu, line.multiplicity, line.modes, line.flag) for line in base.lines
        )
        return SpectralData(m, ext, lines, base.continuum)
    if isinstance(ext, DirectSum):
        lines: list[EigenLine] = []
        for ci, comp in enumerate(ext.components):
            sub = build_spectral_data(HalfLine(), comp, max_modes, lambda_max)
            for line in sub.lines:
                modes = tuple(
                    ModeFunction(md.kind, md.coeffs, ci) for md in line.modes
                )
                lines.append(EigenLine(line.lam, line.multiplicity, modes, line.flag))
        lines.sort(key=lambda ln: ln.lam)
        return SpectralData(m, ext, tuple(lines))
    if isinstance(ext, HalfLineRobin):
        lines = []
        if ext.alpha < 0:
            kappa = -1.0 / math.tan(ext.alpha)
            lam = -kappa * kappa
            lines.append(EigenLine(lam, 1, eigenmodes(m, ext, lam)))
        return SpectralData(m, ext, tuple(lines))
    scale = _length_scale(m)
    if lambda_max is None:
        lambda_max = ((max_modes + 2) * math.pi / scale) ** 2
    if isinstance(ext, CircleClosure):
        triples = [(lam, mult, "") for lam, mult in find_eigenvalues(m, ext, -1.0, lambda_max)]
    else:
        triples = _interval_point_spectrum(m, ext, -((50.0 / scale) ** 2), lambda_max)
    lines = []
    count = 0
    for lam, mult, flag in triples:
        if count >= max_modes:
            break
        modes = eigenmodes(m, ext, lam)
        lines.append(EigenLine(lam, mult, modes, flag))
        count += len(modes)
    return SpectralData(m, ext, tuple(lines))


# ---------------------------------------------------------------------------
# Green's functions


def _greens_interval(ext, a: float, x, y, lam):
    xl = np.minimum(x, y)
    xg = np.maximum(x, y)
    if isinstance(ext, IntervalDirichlet):
        den = sn(lam, a)
        return sn_at(lam, a - xg) * sn_at(lam, xl) / den
    if isinstance(ext, IntervalFirstKind):
        t11, t22, t12 = ext.theta11, ext.theta22, ext.theta12
        cxy = np.where(np.asarray(x) < np.asarray(y), t12, np.conj(t12))
        num = (
            cs_at(lam, a - xg) * cs_at(lam, xl)
            + t22 * sn_at(lam, a - xg) * cs_at(lam, xl)
            + t11 * cs_at(lam, a - xg) * sn_at(lam, xl)
            + t11 * t22 * sn_at(lam, a - xg) * sn_at(lam, xl)
            + abs(t12) ** 2 * sn_at(lam, xg - a) * sn_at(lam, xl)
            + cxy * sn_at(lam, xl - xg)
        )
        den = _interval_condition(ext, a, lam)
        return num / den
    if isinstance(ext, IntervalSecondKind):
        w1, w2, th = ext.w1, ext.w2, ext.theta
        kconst = w1 * np.conj(w2)
        cxy = np.where(np.asarray(x) < np.asarray(y), kconst, np.conj(kconst))
        num = (
            abs(w1) ** 2 * sn_at(lam, xg - a) * cs_at(lam, xl)
            + cxy * sn_at(lam, xl - xg)
            + th * sn_at(lam, xg - a) * sn_at(lam, xl)
            - abs(w2) ** 2 * cs_at(lam, xg - a) * sn_at(lam, xl)
        )
        den = _interval_condition(ext, a, lam)
        return num / den
    raise TypeError(f"not an interval extension: {ext!r}")


def cs_at(lam, u):
    """CS with the roles swapped: scalar lam, array-valued length u."""
    if isinstance(lam, complex) or np.iscomplexobj(lam):
        s = np.sqrt(complex(lam))
        return np.cos(s * np.asarray(u))
    lam = float(lam)
    u = np.asarray(u, dtype=float)
    if lam >= 0:
        return np.cos(math.sqrt(lam) * u)
    return np.cosh(math.sqrt(-lam) * u)


def sn_at(lam, u):
    """SN with scalar lam and array-valued length u."""
    u = np.asarray(u, dtype=float)
    if isinstance(lam, complex) or np.iscomplexobj(lam):
        lamc = complex(lam)
        if abs(lamc) * float(np.max(np.abs(u), initial=0.0)) ** 2 < 1e-8:
            z = lamc * u * u
            return u * (1 - z / 6.0 + z * z / 120.0)
        s = np.sqrt(lamc)
        return np.sin(s * u) / s
    lam = float(lam)
    if abs(lam) * float(np.max(np.abs(u), initial=0.0)) ** 2 < 1e-8:
        z = lam * u * u
        return u * (1 - z / 6.0 + z * z / 120.0)
    if lam > 0:
        s = math.sqrt(lam)
        return np.sin(s * u) / s
    s = math.sqrt(-lam)
    return np.sinh(s * u) / s


def _pole_guard(m: Manifold, ext: Extension, lam: complex):
    lam = complex(lam)
    if abs(lam.imag) > 1e-9 * (1 + abs(lam)):
        return
    x0 = lam.real
    if isinstance(ext, MassShift):
        _pole_guard(m, ext.inner, lam - ext.mu)
        return
    if isinstance(ext, DirectSum):
        for comp in ext.components:
            _pole_guard(HalfLine(), comp, lam)
        return
    if isinstance(ext, HalfLineRobin):
        if x0 >= -1e-12:
            raise GreensPoleError(lam, nearest=None)  # continuum edge/interior
        if ext.alpha < 0:
            bound = -1.0 / math.tan(ext.alpha) ** 2
            if abs(x0 - bound) <= 1e-9 * (1 + abs(bound)):
                raise GreensPoleError(lam, nearest=bound)
        return
    if isinstance(ext, CircleClosure):
        L = m.circumference
        n = round(math.sqrt(max(x0, 0.0)) * L / (2 * math.pi))
        near = (2 * math.pi * n / L) ** 2
        if abs(x0 - near) <= 1e-9 * (1 + abs(near)):
            raise GreensPoleError(lam, nearest=near)
        return
    # interval families: a cheap residual test, eigenvalue lookup only on failure
    resid = abs(complex(_interval_condition(ext, m.length, complex(x0))))
    local = abs(complex(_interval_condition(ext, m.length, complex(x0 + 0.3 * (1 + abs(x0))))))
    if resid <= 1e-9 * max(local, 1e-12) or (abs(x0) < 1e-12 and zero_in_spectrum(m, ext)):
        raise GreensPoleError(lam, nearest=nearest_eigenvalue(m, ext, x0))


def greens_function(m: Manifold, ext: Extension, x, y, lam: complex):
    """Resolvent kernel g(x, y; lam) of the chosen extension.

    Scalar in x (or a (component, x) pair on disjoint unions) and scalar or
    array in y.  lam must lie in the resolvent set; on the half-line the
    continuum [0, inf) is excluded for real lam.
    """
    _pole_guard(m, ext, lam)
    return _greens_raw(m, ext, x, y, lam)


def _greens_raw(m: Manifold, ext: Extension, x, y, lam: complex):
    lam = complex(lam)
    if isinstance(ext, MassShift):
        return _greens_raw(m, ext.inner, x, y, lam - ext.mu)
    if isinstance(ext, DirectSum):
        cx, xx = x if isinstance(x, tuple) else (0, x)
        cy, yy = y if isinstance(y, tuple) else (0, y)
        if cx != cy:
            return 0j
        return _greens_raw(HalfLine(), ext.components[cx], xx, yy, lam)
    if isinstance(ext, CircleClosure):
        L = m.circumference
        d = np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float)) % L
        d = np.minimum(d, L - d)
        half = complex(np.sin(np.sqrt(lam) * (L / 2)) / np.sqrt(lam)) if lam != 0 else L / 2
        val = -cs_at(lam, L / 2 - d) / (2 * lam * half)
        return val if np.ndim(val) else complex(val)
    if isinstance(ext, HalfLineRobin):
        s = _sqrt_upper(lam)
        al = ext.alpha
        amp = 1.0 / (s * (math.cos(al) - 1j * s * math.sin(al)))
        xl = np.minimum(x, y)
        xg = np.maximum(x, y)
        val = amp * (math.cos(al) * np.sin(s * xl) + s * math.sin(al) * np.cos(s * xl)) * np.exp(1j * s * xg)
        return val if np.ndim(val) else complex(val)
    if not isinstance(m, Interval):
        raise ValueError(f"{type(ext).__name__} requires an Interval manifold")
    val = _greens_interval(ext, m.length, np.asarray(x, dtype=float), np.asarray(y, dtype=float), lam)
    return val if np.ndim(val) else complex(val)


def resolvent_apply(
    m: Manifold,
    ext: Extension,
    f,
    support: tuple[float, float],
    lam: complex,
    xs: np.ndarray,
    component: int = 0,
    panels_per_side: int = 64,
):
    """u = (A - lam)^(-1) f sampled on xs, by kernel quadrature.

    `f` is a callable with support inside `support`; the quadrature splits at
    y = x (kernel derivative kink), using a fixed per-side panel count so
    the result varies smoothly with x.  Satisfies (-u'' - lam u) = f.
    """
    _pole_guard(m, ext, lam)
    lo, hi = support
    wav = abs(math.sqrt(abs(lam)))
    out = np.empty(len(xs), dtype=complex)
    for i, x in enumerate(np.asarray(xs, dtype=float)):
        total = 0j
        xq = min(max(x, lo), hi)
        for (p_lo, p_hi) in ((lo, xq), (xq, hi)):
            if p_hi <= p_lo:
                continue
            panels = max(panels_per_side, oscillation_panels(p_lo, p_hi, wav))
            ys, wsq = panel_rule(p_lo, p_hi, panels)
            if isinstance(ext, DirectSum):
                ker = np.array([_greens_raw(m, ext, (component, x), (component, yv), lam) for yv in ys])
            else:
                ker = _greens_raw(m, ext, x, ys, lam)
            total += np.sum(wsq * ker * f(ys))
        out[i] = total
    return out


# ---------------------------------------------------------------------------
# continuum spectral density (Robin half-line)


def spectral_density_closed(alpha: float, x: float, y: float, lam: float) -> float:
    """Closed-form boundary value (1/pi) Im g(x, y; lam + i0) for lam > 0."""
    if lam <= 0:
        raise ValueError("continuum density needs lam > 0")
    k = math.sqrt(lam)
    ux = math.cos(alpha) * math.sin(k * x) + k * math.sin(alpha) * math.cos(k * x)
    uy = math.cos(alpha) * math.sin(k * y) + k * math.sin(alpha) * math.cos(k * y)
    return ux * uy / (math.pi * k * (math.cos(alpha) ** 2 + lam * math.sin(alpha) ** 2))


def continuum_density(ext: HalfLineRobin, x: float, y: float, lam: float) -> float:
    """Spectral density by Richardson extrapolation of Im g(lam + i*eps)/pi.

    eps runs over {1e-3, 1e-4, 1e-5} scaled by (1 + lam); a diagnostic is
    raised when the extrapolation has not converged.
    """
    if not isinstance(ext, HalfLineRobin):
        raise TypeError("continuum density is defined for the Robin half-line")
    if lam <= 0:
        raise ValueError("continuum density needs lam > 0")
    eps = np.array([1e-3, 1e-4, 1e-5]) * (1.0 + lam)
    vals = np.array(
        [(_greens_raw(HalfLine(), ext, x, y, lam + 1j * e)).imag / math.pi for e in eps]
    )
    # Neville extrapolation to eps = 0
    table = vals.copy()
    pts = eps.copy()
    for level in range(1, len(pts)):
        for i in range(len(pts) - level):
            table[i] = table[i + 1] + (table[i] - table[i + 1]) * pts[i + level] / (
                pts[i + level] - pts[i]
            )
    full = table[0]
    last_two = vals[2] + (vals[1] - vals[2]) * pts[2] / (pts[2] - pts[1])
    scale = max(1e-3, abs(full))
    if abs(full - last_two) > 1e-5 * scale:
        raise RuntimeError(
            f"density extrapolation has not converged at lam={lam}: {full} vs {last_two}"
        )
    return float(full)
