import cmath
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from staticwave.extensions import (
    BoundaryTrace,
    CircleClosure,
    DirectSum,
    ExtensionClass,
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
from staticwave.geometry import DisjointHalfLines, HalfLine, Interval
from staticwave.spectral import find_eigenvalues

ROOT2 = math.sqrt(2.0)


def tr(v0=0, va=0, d0=0, da_in=0):
    return BoundaryTrace(value0=v0, value_end=va, inward0=d0, inward_end=da_in)


class TestBoundaryResidual:
    def test_dirichlet_zero_values(self):
        res = boundary_residual(IntervalDirichlet(), tr(0, 0, 2.3, -1.7))
        assert res == (0, 0)

    def test_neumann_zero_derivatives(self):
        ext = IntervalFirstKind(0.0, 0.0, 0.0)
        assert boundary_residual(ext, tr(1, 1, 0, 0)) == (0, 0)
        res = boundary_residual(ext, tr(1, 1, 0.5, 0))
        assert res[0] != 0

    def test_endpoint_coupling(self):
        # phi'(0) = phi(a) and phi(0) = -phi'(a): trace with those relations
        ext = IntervalFirstKind(0.0, 0.0, 1.0)
        phi0, phia = 0.7, -0.3
        trace = tr(phi0, phia, d0=phia, da_in=phi0)  # inward_end = -phi'(a) = phi(0)
        res = boundary_residual(ext, trace)
        assert max(abs(r) for r in res) < 1e-15

    def test_robin_family(self):
        alpha = 0.6
        ext = HalfLineRobin(alpha)
        trace = tr(v0=math.sin(alpha), d0=math.cos(alpha))
        assert abs(boundary_residual(ext, trace)[0]) < 1e-15

    def test_circle_empty(self):
        assert boundary_residual(CircleClosure(), tr()) == ()

    def test_mass_shift_same_conditions(self):
        base = IntervalFirstKind(1.0, -2.0, 0.5 + 0.5j)
        trace = tr(0.3, -0.1, 0.9, 0.2)
        assert boundary_residual(MassShift(base, 2.0), trace) == boundary_residual(base, trace)

    def test_direct_sum_concatenates(self):
        ext = DirectSum((HalfLineRobin(0.0), HalfLineRobin(math.pi / 2)))
        traces = BoundaryTrace(components=(tr(v0=0.0, d0=5.0), tr(v0=3.0, d0=0.0)))
        assert all(abs(r) < 1e-15 for r in boundary_residual(ext, traces))

    def test_hermitian_endpoint_swap(self):
        # swapping the endpoints with the conjugate-transposed matrix keeps
        # the kernel of the conditions
        t11, t22, t12 = 0.7, -1.3, 0.4 - 0.9j
        ext = IntervalFirstKind(t11, t22, t12)
        swapped = IntervalFirstKind(t22, t11, t12.conjugate())
        for v0, va, d0, da in [(1.0, 0.5j, None, None), (0.3 - 1j, 2.0, None, None)]:
            d0 = t11 * v0 + t12 * va
            da = t12.conjugate() * v0 + t22 * va
            assert max(abs(r) for r in boundary_residual(ext, tr(v0, va, d0, da))) < 1e-12
            res = boundary_residual(swapped, tr(va, v0, da, d0))
            assert max(abs(r) for r in res) < 1e-12


class TestClassify:
    def test_robin_positive(self):
        assert classify(HalfLine(), HalfLineRobin(math.pi / 4)).value is ExtensionClass.POSITIVE

    def test_robin_bound_state(self):
        cls = classify(HalfLine(), HalfLineRobin(-math.pi / 4))
        assert cls.value is ExtensionClass.BOUNDED_BELOW
        assert cls.spectrum_floor == pytest.approx(-1.0)

    def test_interval_attractive_end(self):
        # frozen oracle: bracketed root of the hyperbolic-branch condition
        cls = classify(Interval(1.0), IntervalFirstKind(-3.0, 0.0, 0.0))
        assert cls.value is ExtensionClass.BOUNDED_BELOW
        assert cls.spectrum_floor == pytest.approx(-9.087106407004281, rel=1e-10)

    def test_single_component_never_unbounded(self, catalog):
        for label, m, ext, _ in catalog:
            if label == "direct_sum":
                continue
            assert classify(m, ext).bounded_below

    def test_direct_sum_truncation_trend(self):
        sizes = (2, 4, 8)
        fams = []
        for n_max in sizes:
            ext = DirectSum(tuple(HalfLineRobin(-1.0 / (n + 2)) for n in range(n_max)))
            fams.append(classify(DisjointHalfLines(n_max), ext))
        floors = [c.spectrum_floor for c in fams]
        # deepest component is alpha = -1/(n_max+1)
        assert floors == pytest.approx([-1 / math.tan(1 / (n + 1)) ** 2 for n in sizes])
        fam = classify_family(fams)
        assert fam.value is ExtensionClass.ACCEPTABLE_UNBOUNDED_BELOW


class TestMassShift:
    def test_circle_spectrum_shift(self):
        desc = mass_shift_spectrum(CircleClosure(), 1.0)
        assert desc.shift_spectrum([0, 1, 4, 9]) == [1, 2, 5, 10]

    def test_zero_shift_identity(self):
        desc = mass_shift_spectrum(IntervalDirichlet(), 0.0)
        assert desc.shift_eigenvalue(4.0) == 4.0
        assert desc.kernel_argument(2.5 + 1j) == 2.5 + 1j

    def test_dirichlet_shifted_eigenvalues(self):
        m = Interval(math.pi)
        eig = find_eigenvalues(m, MassShift(IntervalDirichlet(), 1.0), 0, 12)
        assert [lam for lam, _ in eig] == pytest.approx([2.0, 5.0, 10.0])


class TestCanonicalize:
    def test_phase_and_scale(self):
        ext = canonicalize(IntervalSecondKind(1j, 0.0, 1.0))
        assert ext.w1 == pytest.approx(1.0)
        assert ext.w2 == 0

    def test_already_canonical_unchanged(self):
        ext = IntervalSecondKind(1 / ROOT2, 1 / ROOT2, 0.5)
        assert canonicalize(ext) is ext

    def test_global_phase_removed(self):
        phase = cmath.exp(1j * math.pi / 3)
        ext = canonicalize(IntervalSecondKind(phase / ROOT2, phase / ROOT2, 0.0))
        assert ext.w1 == pytest.approx(1 / ROOT2)
        assert ext.w2 == pytest.approx(1 / ROOT2)

    def test_rejects_zero_vector(self):
        with pytest.raises(ValueError):
            IntervalSecondKind(0.0, 0.0, 1.0)

    @settings(max_examples=30, deadline=None)
    @given(
        st.complex_numbers(min_magnitude=0.1, max_magnitude=3.0, allow_nan=False, allow_infinity=False),
        st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False),
        st.floats(min_value=-2, max_value=2),
    )
    def test_idempotent_and_kernel_preserving(self, w1, w2, theta):
        ext = IntervalSecondKind(w1, w2, theta)
        canon = canonicalize(ext)
        again = canonicalize(canon)
        assert again == canon
        assert abs(abs(canon.w1) ** 2 + abs(canon.w2) ** 2 - 1) < 1e-12
        # a trace satisfying the original conditions satisfies the canonical ones
        v0 = w1
        va = w2
        d0 = theta * v0
        da = theta * va
        trace = tr(v0, va, d0, da)
        orig = max(abs(r) for r in boundary_residual(ext, trace))
        new = max(abs(r) for r in boundary_residual(canon, trace))
        assert orig < 1e-12 and new < 1e-12
