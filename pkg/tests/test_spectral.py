import math

import numpy as np
import pytest
from scipy.integrate import quad

from staticwave.extensions import (
    CircleClosure,
    DirectSum,
    HalfLineRobin,
    IntervalDirichlet,
    IntervalFirstKind,
    IntervalSecondKind,
    MassShift,
    boundary_residual,
)
from staticwave.geometry import Circle, DisjointHalfLines, HalfLine, Interval
from staticwave.spectral import (  # noqa: F401
    RootIsolationError,
    build_spectral_data,
    eigenfunction,
    eigenmodes,
    eigenvalue_condition,
    find_eigenvalues,
    mode_trace,
    negative_eigenvalues,
    zero_in_spectrum,
)

ROOT2 = math.sqrt(2.0)

# frozen oracle (scipy brentq on sin s = 2s/(s^2+1), xtol 1e-15)
COUPLED_LAMBDAS = [1.7070529755509227, 5.434131505846556, 43.35722110493781, 84.79524852582107]


class TestEigenvalueCondition:
    def test_dirichlet_zero_at_eigenvalue(self):
        assert abs(eigenvalue_condition(Interval(math.pi), IntervalDirichlet(), 4.0)) < 1e-14

    def test_neumann_reduction(self):
        m = Interval(math.pi)
        ext = IntervalFirstKind(0.0, 0.0, 0.0)
        assert abs(eigenvalue_condition(m, ext, 4.0)) < 1e-13

    def test_coupled_residual_scales_to_reference(self):
        # the sqrt(lam)-scaled residual at lam = pi^2 equals 2 pi
        m = Interval(1.0)
        ext = IntervalFirstKind(0.0, 0.0, 1.0)
        lam = math.pi**2
        resid = eigenvalue_condition(m, ext, lam)
        assert math.sqrt(lam) * resid == pytest.approx(2 * math.pi, rel=1e-13)

    def test_branch_free_across_zero(self):
        # analytic continuation: no jump between the trig and hyperbolic
        # sides beyond the O(eps * slope) analytic variation
        m = Interval(1.3)
        ext = IntervalFirstKind(0.4, -0.2, 0.3 + 0.1j)
        eps = 1e-9
        left = eigenvalue_condition(m, ext, -eps)
        right = eigenvalue_condition(m, ext, eps)
        mid = eigenvalue_condition(m, ext, 0.0)
        assert abs(left - mid) < 20 * eps
        assert abs(right - mid) < 20 * eps

    def test_robin_negative_branch(self):
        ext = HalfLineRobin(-math.pi / 4)
        assert abs(eigenvalue_condition(HalfLine(), ext, -1.0)) < 1e-14
        assert eigenvalue_condition(HalfLine(), ext, -4.0) != 0


class TestZeroCriteria:
    def test_second_kind_periodic_admits_zero(self):
        ext = IntervalSecondKind(1 / ROOT2, 1 / ROOT2, 0.0)
        assert zero_in_spectrum(Interval(2 * math.pi), ext)

    def test_first_kind_straddling(self):
        # criterion Q = a|t12|^2 - t11 - a t11 t22 - t22 - 2 Re t12 with
        # t12 = 1, t22 = 0, a = 1: Q = -1 - t11, zero exactly at t11 = -1
        m = Interval(1.0)
        for t11, expected in [(-1.0, True), (-0.5, False), (-1.5, False)]:
            ext = IntervalFirstKind(t11, 0.0, 1.0)
            assert zero_in_spectrum(m, ext) is expected

    def test_zero_mode_is_affine(self):
        m = Interval(1.0)
        ext = IntervalFirstKind(-1.0, 0.0, 1.0)
        (mode,) = eigenmodes(m, ext, 0.0)
        assert mode.kind == "linear"
        xs = np.linspace(0, 1, 11)
        vals = np.asarray(mode(xs))
        # the analytic kernel is proportional to 1 - x, normalized
        ref = (1 - xs) * math.sqrt(3.0)
        assert np.max(np.abs(vals - ref)) < 1e-12


class TestFindEigenvalues:
    def test_dirichlet_squares(self):
        eig = find_eigenvalues(Interval(math.pi), IntervalDirichlet(), 0, 30)
        assert [round(l) for l, _ in eig] == [1, 4, 9, 16, 25]
        for lam, _ in eig:
            assert abs(lam - round(lam)) <= 1e-12 * max(1, lam)

    def test_robin_bound_state(self):
        eig = find_eigenvalues(HalfLine(), HalfLineRobin(-math.pi / 4), -10, 0)
        assert len(eig) == 1
        assert eig[0][0] == pytest.approx(-1.0, abs=1e-12)

    def test_periodic_zero_and_doubles(self):
        ext = IntervalSecondKind(1 / ROOT2, 1 / ROOT2, 0.0)
        eig = find_eigenvalues(Interval(2 * math.pi), ext, -1, 10)
        assert eig[0] == (0.0, 1)
        assert [mu for _, mu in eig[1:]] == [2, 2, 2]
        for lam, _ in eig[1:]:
            assert abs(lam - round(lam)) < 1e-9

    def test_coupled_frozen_oracle(self):
        eig = find_eigenvalues(Interval(1.0), IntervalFirstKind(0.0, 0.0, 1.0), -5, 100)
        got = [l for l, _ in eig]
        assert got == pytest.approx(COUPLED_LAMBDAS, rel=1e-11)

    def test_near_degenerate_pair_split(self):
        # oracle (brentq): second root near s=1 for theta=0.01 sits at
        # lam = 1.0063559194106555; s=1 itself stays a root
        ext = IntervalSecondKind(1 / ROOT2, 1 / ROOT2, 0.01)
        eig = find_eigenvalues(Interval(2 * math.pi), ext, 0.5, 2.0)
        lams = [l for l, _ in eig]
        assert lams == pytest.approx([1.0, 1.0063559194106555], rel=1e-9)

    def test_negative_count_bounds(self):
        # both ends attractive: exactly two bound states on the interval
        neg = negative_eigenvalues(Interval(1.0), IntervalFirstKind(-5.0, -5.0, 0.0))
        assert len(neg) == 2
        assert len(negative_eigenvalues(HalfLine(), HalfLineRobin(-0.3))) == 1

    def test_circle_multiplicities(self):
        eig = find_eigenvalues(Circle(2 * math.pi), CircleClosure(), -1, 10)
        assert eig == [(0.0, 1), (1.0, 2), (4.0, 2), (9.0, 2)]

    def test_direct_sum_union(self):
        ext = DirectSum((HalfLineRobin(-0.5), HalfLineRobin(-0.25)))
        eig = find_eigenvalues(DisjointHalfLines(2), ext, -100, 0)
        expect = sorted([-1 / math.tan(-0.5) ** 2, -1 / math.tan(-0.25) ** 2])
        assert [l for l, _ in eig] == pytest.approx(expect)

    def test_mass_shift(self):
        eig = find_eigenvalues(Circle(2 * math.pi), MassShift(CircleClosure(), 1.0), 0, 12)
        assert eig == [(1.0, 1), (2.0, 2), (5.0, 2), (10.0, 2)]


class TestEigenfunctions:
    def test_dirichlet_modes_closed_form(self):
        m = Interval(math.pi)
        for n in (1, 2, 5):
            mode = eigenfunction(m, IntervalDirichlet(), float(n * n))
            xs = np.linspace(0, math.pi, 401)
            ref = math.sqrt(2 / math.pi) * np.sin(n * xs)
            vals = np.asarray(mode(xs))
            sign = np.sign(np.real(vals[1] * ref[1])) or 1.0
            assert np.max(np.abs(vals - sign * ref)) < 1e-10

    def test_circle_constant(self):
        mode = eigenfunction(Circle(2 * math.pi), CircleClosure(), 0.0)
        assert complex(np.asarray(mode(1.3)).item()) == pytest.approx(1 / math.sqrt(2 * math.pi))

    def test_robin_bound_state_shape(self):
        mode = eigenfunction(HalfLine(), HalfLineRobin(-math.pi / 4), -1.0)
        xs = np.linspace(0, 10, 101)
        ref = math.sqrt(2.0) * np.exp(-xs)
        assert np.max(np.abs(np.asarray(mode(xs)) - ref)) < 1e-12

    def test_normalization_quadrature_oracle(self):
        # independent oracle: scipy.integrate.quad on |mode|^2
        m = Interval(1.0)
        ext = IntervalFirstKind(0.0, 0.0, 1.0)
        for lam in COUPLED_LAMBDAS[:2]:
            mode = eigenfunction(m, ext, lam)
            val, _ = quad(lambda x: abs(complex(np.asarray(mode(x)).item())) ** 2, 0, 1, limit=200)
            assert val == pytest.approx(1.0, abs=1e-10)

    def test_boundary_residuals_vanish(self, catalog):
        for label, m, ext, _ in catalog:
            if label in ("circle", "massive_circle", "direct_sum"):
                continue
            window = (-30, 40) if label != "robin_positive" else (-30, -1e-6)
            eig = find_eigenvalues(m, ext, *window)
            for lam, _ in eig[:4]:
                for mode in eigenmodes(m, ext, lam):
                    res = boundary_residual(ext, mode_trace(mode, m))
                    assert max((abs(r) for r in res), default=0.0) < 1e-8, label

    def test_orthonormal_pair_at_double_eigenvalue(self):
        ext = IntervalSecondKind(1 / ROOT2, 1 / ROOT2, 0.0)
        m = Interval(2 * math.pi)
        pair = eigenmodes(m, ext, 1.0)
        assert len(pair) == 2
        xs = np.linspace(0, 2 * math.pi, 4001)
        v0, v1 = np.asarray(pair[0](xs)), np.asarray(pair[1](xs))
        gram = np.array(
            [
                [np.trapezoid(np.conj(a) * b, xs) for b in (v0, v1)]
                for a in (v0, v1)
            ]
        )
        assert np.max(np.abs(gram - np.eye(2))) < 1e-8

    def test_not_an_eigenvalue_rejected(self):
        with pytest.raises(ValueError):
            eigenfunction(Interval(math.pi), IntervalDirichlet(), 2.5)


class TestSpectralData:
    def test_sorted_strictly_increasing(self, catalog):
        for label, m, ext, _ in catalog:
            spec = build_spectral_data(m, ext, max_modes=24)
            lams = spec.eigenvalues()
            assert all(a < b for a, b in zip(lams, lams[1:])), label

    def test_gram_identity(self):
        # orthonormality across distinct eigenvalues, Gauss quadrature
        from staticwave.quadrature import piecewise_rule

        m = Interval(1.0)
        spec = build_spectral_data(m, IntervalFirstKind(0.0, 0.0, 1.0), max_modes=12)
        modes = [mode for _, mode in spec.basis_modes()]
        k_hi = math.sqrt(max(spec.eigenvalues()))
        xs, ws = piecewise_rule([(0.0, 1.0)], 1 / 64, k_hi)
        V = np.vstack([np.asarray(md(xs)) for md in modes])
        gram = np.conj(V) @ (ws[:, None] * V.T)
        assert np.max(np.abs(gram - np.eye(len(modes)))) < 1e-8

    def test_tight_pair_resolved(self):
        # pair split by 6.4e-6: adaptively bisected into two simple roots
        ext = IntervalSecondKind(1 / ROOT2, 1 / ROOT2, 1e-5)
        eig = find_eigenvalues(Interval(2 * math.pi), ext, 0.5, 2.0)
        assert len(eig) == 2
        assert eig[0][0] == pytest.approx(1.0, abs=1e-9)
        assert eig[1][0] == pytest.approx(1.0000063661977237, abs=1e-9)

    def test_unresolvable_pair_merges_with_multiplicity(self):
        # below float resolution the pair collapses to one line counted twice
        ext = IntervalSecondKind(1 / ROOT2, 1 / ROOT2, 1e-8)
        eig = find_eigenvalues(Interval(2 * math.pi), ext, 0.5, 2.0)
        assert len(eig) == 1
        assert eig[0][0] == pytest.approx(1.0, abs=1e-7)
        assert eig[0][1] == 2
