"""Catalog of self-adjoint extensions of minus the 1D Laplacian.

Each extension is an immutable value describing the boundary conditions
that carve a self-adjoint operator out of the adjoint: the unique closure
on the circle, the one-parameter Robin family on the half-line, the
Dirichlet / Hermitian-matrix ("first kind") / projected ("second kind")
families on an interval, additive mass shifts, and finite direct sums
over disjoint unions.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

from .geometry import (
    Circle,
    DisjointHalfLines,
    HalfLine,
    Interval,
    Manifold,
    component_count,
)

__all__ = [
    "CircleClosure",
    "HalfLineRobin",
    "IntervalDirichlet",
    "IntervalFirstKind",
    "IntervalSecondKind",
    "MassShift",
    "DirectSum",
    "Extension",
    "BoundaryTrace",
    "ExtensionClass",
    "Classification",
    "boundary_residual",
    "classify",
    "classify_family",
    "canonicalize",
    "mass_shift_spectrum",
    "MassShiftDescriptor",
    "base_manifold_ok",
]


@dataclass(frozen=True)
class CircleClosure:
    """The unique self-adjoint extension on the circle (no boundary)."""


@dataclass(frozen=True)
class HalfLineRobin:
    """Robin condition cos(alpha)*phi(0) = sin(alpha)*phi'(0), alpha in (-pi/2, pi/2].

    alpha = 0 is Dirichlet, alpha = pi/2 is Neumann; alpha < 0 binds a
    negative eigenvalue -cot(alpha)^2.
    """

    alpha: float

    def __post_init__(self):
        if not (-math.pi / 2 < self.alpha <= math.pi / 2):
            raise ValueError(f"alpha must lie in (-pi/2, pi/2], got {self.alpha}")


@dataclass(frozen=True)
class IntervalDirichlet:
    """phi(0) = phi(a) = 0."""


@dataclass(frozen=True)
class IntervalFirstKind:
    """Hermitian-matrix boundary coupling on (0, a).

    Conditions: theta11*phi(0) - phi'(0) + theta12*phi(a) = 0 and
    conj(theta12)*phi(0) + theta22*phi(a) + phi'(a) = 0.  theta12 may be
    complex and couples the two endpoints; theta = 0 is Neumann.
    """

    theta11: float
    theta22: float
    theta12: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "theta12", complex(self.theta12))


@dataclass(frozen=True)
class IntervalSecondKind:
    """Rank-one projected coupling on (0, a), indexed by a unit (w1, w2) and real theta.

    Conditions: w2*phi(0) - w1*phi(a) = 0 and
    conj(w1)*(theta*phi(0) - phi'(0)) + conj(w2)*(theta*phi(a) + phi'(a)) = 0.
    """

    w1: complex
    w2: complex
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "w1", complex(self.w1))
        object.__setattr__(self, "w2", complex(self.w2))
        if abs(self.w1) == 0 and abs(self.w2) == 0:
            raise ValueError("(w1, w2) must be nonzero")


@dataclass(frozen=True)
class MassShift:
    """The extension A + mu acting on the same domain (mu = squared mass)."""

    inner: "Extension"
    mu: float

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError(f"mass shift must be >= 0, got {self.mu}")


@dataclass(frozen=True)
class DirectSum:
    """Componentwise extension over a disjoint union, one entry per component."""

    components: tuple["Extension", ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise ValueError("direct sum needs at least one component")


Extension = (
    CircleClosure
    | HalfLineRobin
    | IntervalDirichlet
    | IntervalFirstKind
    | IntervalSecondKind
    | MassShift
    | DirectSum
)


def base_manifold_ok(m: Manifold, ext: Extension) -> bool:
    """Whether the extension family matches the manifold type."""
    if isinstance(ext, MassShift):
        return base_manifold_ok(m, ext.inner)
    if isinstance(ext, DirectSum):
        return isinstance(m, DisjointHalfLines) and len(ext.components) == component_count(m) and all(
            isinstance(c, (HalfLineRobin, MassShift)) for c in ext.components
        )
    if isinstance(ext, CircleClosure):
        return isinstance(m, Circle)
    if isinstance(ext, HalfLineRobin):
        return isinstance(m, HalfLine)
    return isinstance(m, Interval)


@dataclass(frozen=True)
class BoundaryTrace:
    """Boundary values and inward derivatives of a candidate domain element.

    For an interval: (phi(0), phi(a), phi'(0), -phi'(a)).  On the half-line
    only the x=0 entries are used.  For direct sums, pass one trace per
    component via `components`.
    """

    value0: complex = 0j
    value_end: complex = 0j
    inward0: complex = 0j
    inward_end: complex = 0j
    components: tuple["BoundaryTrace", ...] = field(default=())


def boundary_residual(ext: Extension, trace: BoundaryTrace) -> tuple[complex, ...]:
    """Residuals of the extension's boundary conditions; all zero iff satisfied."""
    if isinstance(ext, CircleClosure):
        return ()
    if isinstance(ext, MassShift):
        return boundary_residual(ext.inner, trace)
    if isinstance(ext, DirectSum):
        traces = trace.components if trace.components else (trace,) * len(ext.components)
        if len(traces) != len(ext.components):
            raise ValueError("one trace per direct-sum component required")
        out: list[complex] = []
        for comp, tr in zip(ext.components, traces):
            out.extend(boundary_residual(comp, tr))
        return tuple(out)
    r0, ra = complex(trace.value0), complex(trace.value_end)
    t0, ta = complex(trace.inward0), complex(trace.inward_end)
    if isinstance(ext, HalfLineRobin):
        return (math.cos(ext.alpha) * r0 - math.sin(ext.alpha) * t0,)
    if isinstance(ext, IntervalDirichlet):
        return (r0, ra)
    if isinstance(ext, IntervalFirstKind):
        return (
            ext.theta11 * r0 + ext.theta12 * ra - t0,
            ext.theta12.conjugate() * r0 + ext.theta22 * ra - ta,
        )
    if isinstance(ext, IntervalSecondKind):
        w1, w2 = ext.w1, ext.w2
        return (
            w2 * r0 - w1 * ra,
            w1.conjugate() * (ext.theta * r0 - t0) + w2.conjugate() * (ext.theta * ra - ta),
        )
    raise TypeError(f"unknown extension {ext!r}")


class ExtensionClass(enum.Enum):
    POSITIVE = "positive"
    BOUNDED_BELOW = "bounded_below"
    ACCEPTABLE_UNBOUNDED_BELOW = "acceptable_unbounded_below"


@dataclass(frozen=True)
class Classification:
    value: ExtensionClass
    spectrum_floor: float  # inf of the spectrum (-inf if unbounded below)

    @property
    def positive(self) -> bool:
        return self.value is ExtensionClass.POSITIVE

    @property
    def bounded_below(self) -> bool:
        return self.value is not ExtensionClass.ACCEPTABLE_UNBOUNDED_BELOW


def classify(m: Manifold, ext: Extension) -> Classification:
    """Classify an extension as positive / bounded below.

    Single-component extensions of the catalog are always bounded below
    (finite deficiency indices), hence acceptable; they are positive
    exactly when no negative eigenvalue exists.  Finite direct sums take
    the minimum over components.
    """
    if isinstance(ext, MassShift):
        inner = classify(m, ext.inner)
        floor = inner.spectrum_floor + ext.mu
        value = ExtensionClass.POSITIVE if floor >= 0 else ExtensionClass.BOUNDED_BELOW
        return Classification(value, floor)
    if isinstance(ext, DirectSum):
        floors = [
            classify(HalfLine(), comp).spectrum_floor for comp in ext.components
        ]
        floor = min(floors)
        value = ExtensionClass.POSITIVE if floor >= 0 else ExtensionClass.BOUNDED_BELOW
        return Classification(value, floor)
    if isinstance(ext, (CircleClosure, IntervalDirichlet)):
        return Classification(ExtensionClass.POSITIVE, 0.0)
    if isinstance(ext, HalfLineRobin):
        if ext.alpha < 0:
            return Classification(
                ExtensionClass.BOUNDED_BELOW, -1.0 / math.tan(ext.alpha) ** 2
            )
        return Classification(ExtensionClass.POSITIVE, 0.0)
    # interval first/second kind: search the hyperbolic branch for bound states
    from .spectral import negative_eigenvalues

    if not isinstance(m, Interval):
        raise ValueError(f"{type(ext).__name__} requires an Interval manifold")
    neg = negative_eigenvalues(m, ext)
    if neg:
        return Classification(ExtensionClass.BOUNDED_BELOW, min(lam for lam, _ in neg))
    return Classification(ExtensionClass.POSITIVE, 0.0)


def classify_family(classifications) -> Classification:
    """Classify a truncation family by the trend of its spectrum floors.

    Finite truncations of a direct sum are individually bounded below; when
    the floors decrease without apparent bound across truncation sizes the
    family is flagged acceptable-but-unbounded-below (acceptability is
    inherited componentwise).
    """
    floors = [c.spectrum_floor for c in classifications]
    if len(floors) < 2:
        raise ValueError("need at least two truncation sizes to judge a trend")
    diverging = all(b < a for a, b in zip(floors, floors[1:])) and floors[-1] <= 4 * floors[0]
    if diverging:
        return Classification(ExtensionClass.ACCEPTABLE_UNBOUNDED_BELOW, -math.inf)
    value = ExtensionClass.POSITIVE if min(floors) >= 0 else ExtensionClass.BOUNDED_BELOW
    return Classification(value, min(floors))


def canonicalize(ext: Extension) -> Extension:
    """Normalize the extension's parameters to the canonical representative.

    Second-kind (w1, w2) is rescaled to unit norm with the first nonzero
    component made real positive (boundary conditions are invariant under
    a global phase).  Idempotent.
    """
    if isinstance(ext, MassShift):
        return MassShift(canonicalize(ext.inner), ext.mu)
    if isinstance(ext, DirectSum):
        return DirectSum(tuple(canonicalize(c) for c in ext.components))
    if not isinstance(ext, IntervalSecondKind):
        return ext
    w1, w2 = ext.w1, ext.w2
    norm = math.hypot(abs(w1), abs(w2))
    lead = w1 if abs(w1) > 1e-14 * norm else w2
    if abs(norm - 1.0) < 1e-14 and lead.imag == 0.0 and lead.real > 0:
        return ext  # already canonical: keep bit-identical for idempotence
    w1, w2 = w1 / norm, w2 / norm
    lead = w1 if abs(w1) > 1e-14 else w2
    phase = cmath.exp(-1j * cmath.phase(lead))
    w1, w2 = w1 * phase, w2 * phase
    # snap rotation roundoff so repeated canonicalization is stable
    w1 = complex(w1.real, 0.0) if abs(w1.imag) < 1e-15 else w1
    w2 = complex(w2.real, 0.0) if abs(w2.imag) < 1e-15 else w2
    return IntervalSecondKind(w1, w2, ext.theta)


@dataclass(frozen=True)
class MassShiftDescriptor:
    """How a mass shift transforms spectra and resolvent kernels."""

    mu: float

    def shift_eigenvalue(self, lam: float) -> float:
        return lam + self.mu

    def shift_spectrum(self, lams):
        return [lam + self.mu for lam in lams]

    def kernel_argument(self, lam: complex) -> complex:
        """Resolvent of the shifted operator at lam is the base kernel here."""
        return lam - self.mu


def mass_shift_spectrum(ext: Extension, mu: float) -> MassShiftDescriptor:
    """Descriptor for the spectrum/kernel reindexing of ext + mu."""
    if mu < 0:
        raise ValueError("mass shift must be >= 0")
    return MassShiftDescriptor(mu)
