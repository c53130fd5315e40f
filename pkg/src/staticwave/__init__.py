"""Spectral Klein-Gordon simulator for 1+1 static spacetimes with open edges.

The dynamics is generated by a chosen self-adjoint extension of minus the
Laplacian on the spatial slice: fields evolve through the branch-free
cosine/sine functional calculus, realized as eigenmode sums plus a
scattering-continuum quadrature on the half-line.  Includes the causal
window calculus, conserved energy/symplectic forms, a finite-difference
oracle and a verification battery.
"""

__version__ = "0.1.0"

from .geometry import (  # noqa: F401
    CausalWindow,
    Circle,
    DisjointHalfLines,
    HalfLine,
    Interval,
    SpatialSet,
    causal_slice,
    closed_neighborhood,
    distance,
    in_cauchy_development,
    t_infinity,
    t_ladder,
)
from .extensions import (  # noqa: F401
    BoundaryTrace,
    CircleClosure,
    DirectSum,
    HalfLineRobin,
    IntervalDirichlet,
    IntervalFirstKind,
    IntervalSecondKind,
    MassShift,
    boundary_residual,
    canonicalize,
    classify,
    classify_family,
    mass_shift_spectrum,
)
from .spectral import (  # noqa: F401
    GreensPoleError,
    ModeFunction,
    SpectralData,
    build_spectral_data,
    continuum_density,
    eigenfunction,
    eigenvalue_condition,
    find_eigenvalues,
    greens_function,
    resolvent_apply,
    zero_in_spectrum,
)
from .evolution import (  # noqa: F401
    Bump,
    CauchyData,
    FieldState,
    ModeComponent,
    ScalarOverflowError,
    Solution,
    assemble_data,
    build_basis,
    c_scalar,
    check_composition,
    check_pythagoras,
    evolve,
    make_bump,
    mode_coefficients,
    s_scalar,
    second_derivative_check,
    solve,
)
from .observables import (  # noqa: F401
    ConservedSeries,
    canonical_partner,
    conserved_series,
    energy,
    leakage,
    symmetry_defects,
    symplectic,
    time_reflect,
    time_translate,
)
from .oracle_fd import FDGrid, fd_evolve  # noqa: F401
