import cmath
import math

import numpy as np
import pytest

from staticwave.extensions import (
    CircleClosure,
    DirectSum,
    HalfLineRobin,
    IntervalDirichlet,
    IntervalFirstKind,
    IntervalSecondKind,
    MassShift,
)
from staticwave.geometry import Circle, DisjointHalfLines, HalfLine, Interval
from staticwave.spectral import (
    GreensPoleError,
    build_spectral_data,
    continuum_density,
    greens_function,
    resolvent_apply,
    spectral_density_closed,
)


def chart_circle_kernel(th, ph, lam, branch=+1):
    """Reference kernel on the punctured circle chart (circumference 2 pi)."""
    s = branch * cmath.sqrt(lam)
    d = abs(th - ph)
    return (1j / (2 * s)) * (
        cmath.exp(1j * s * d) + 2 * cmath.cos(s * (th - ph)) / (cmath.exp(-2j * math.pi * s) - 1)
    )


def dirichlet_kernel_branch(x, y, lam, a, branch=+1):
    s = branch * cmath.sqrt(lam)
    xl, xg = min(x, y), max(x, y)
    return cmath.sin(s * (a - xg)) * cmath.sin(s * xl) / (s * cmath.sin(s * a))


class TestClosedForms:
    def test_dirichlet_lambda_zero(self):
        a = 1.0
        m = Interval(a)
        for x, y in [(0.3, 0.7), (0.5, 0.5), (0.9, 0.1)]:
            g = greens_function(m, IntervalDirichlet(), x, y, 0.0)
            assert abs(g - (a - max(x, y)) * min(x, y) / a) < 1e-15

    def test_circle_matches_chart_formula(self):
        m = Circle(2 * math.pi)
        for lam in (0.3 + 0.4j, -2.0 + 0j, 2.5 + 0j):
            for th, ph in [(1.0, 2.5), (0.2, 5.9), (3.0, 3.7)]:
                mine = greens_function(m, CircleClosure(), th, ph, lam)
                ref = chart_circle_kernel(th, ph, lam)
                assert abs(mine - ref) < 1e-12 * max(1, abs(ref))

    def test_circle_against_mode_sum(self):
        # independent eigenfunction-sum oracle (truncation-limited)
        m = Circle(2 * math.pi)
        lam = 2.3
        th, ph = 1.0, 2.5
        n = np.arange(1, 300001)
        ref = (1 / (2 * math.pi)) / (0 - lam) + float(
            np.sum(np.cos(n * (th - ph)) / math.pi / (n**2 - lam))
        )
        mine = greens_function(m, CircleClosure(), th, ph, lam)
        assert abs(mine - ref) < 1e-5

    def test_interval_mode_sum_oracle(self):
        m = Interval(1.0)
        ext = IntervalFirstKind(0.0, 0.0, 1.0)
        spec = build_spectral_data(m, ext, max_modes=400)
        lam = 3.0 + 0j
        x, y = 0.35, 0.8
        acc = 0j
        for line in spec.lines:
            for mode in line.modes:
                acc += complex(np.asarray(mode(x)).item()) * np.conj(
                    complex(np.asarray(mode(y)).item())
                ) / (line.lam - lam)
        mine = greens_function(m, ext, x, y, lam)
        assert abs(mine - acc) < 2e-4  # 1/lam_N tail

    def test_branch_invariance(self):
        m = Interval(1.0)
        for lam in (2.5 + 0.5j, -1.3 + 0j, 7.1 - 2j):
            g1 = dirichlet_kernel_branch(0.3, 0.8, lam, 1.0, +1)
            g2 = dirichlet_kernel_branch(0.3, 0.8, lam, 1.0, -1)
            assert abs(g1 - g2) < 1e-12 * max(1, abs(g1))
            mine = greens_function(m, IntervalDirichlet(), 0.3, 0.8, lam)
            assert abs(mine - g1) < 1e-12 * max(1, abs(g1))
        for lam in (0.3 + 0.4j, -2.0 + 0j):
            c1 = chart_circle_kernel(1.0, 2.5, lam, +1)
            c2 = chart_circle_kernel(1.0, 2.5, lam, -1)
            assert abs(c1 - c2) < 1e-12 * max(1, abs(c1))

    def test_mass_shift_reindexes_kernel(self):
        m = Circle(2 * math.pi)
        lam = 2.3 + 0.7j
        g1 = greens_function(m, MassShift(CircleClosure(), 1.0), 1.0, 2.5, lam)
        g2 = greens_function(m, CircleClosure(), 1.0, 2.5, lam - 1.0)
        assert g1 == g2

    def test_direct_sum_block_diagonal(self):
        m = DisjointHalfLines(2)
        ext = DirectSum((HalfLineRobin(-0.5), HalfLineRobin(0.5)))
        lam = 1.0 + 1.0j
        same = greens_function(m, ext, (0, 1.0), (0, 2.0), lam)
        ref = greens_function(HalfLine(), HalfLineRobin(-0.5), 1.0, 2.0, lam)
        assert same == ref
        assert greens_function(m, ext, (0, 1.0), (1, 2.0), lam) == 0


class TestResolventProperties:
    def test_symmetry_under_conjugation(self, catalog):
        rng = np.random.default_rng(7)
        for label, m, ext, _ in catalog:
            if label == "direct_sum":
                continue
            lam = complex(rng.uniform(0.5, 3), rng.uniform(0.5, 2))
            span = 1.0 if label.startswith(("robin",)) else None
            x, y = (0.3, 0.8) if span is None else (0.7, 1.9)
            if label in ("circle", "massive_circle"):
                x, y = 1.0, 2.5
            g_xy = greens_function(m, ext, x, y, lam)
            g_yx = greens_function(m, ext, y, x, np.conj(lam))
            assert abs(g_xy - np.conj(g_yx)) < 1e-12 * max(1, abs(g_xy)), label

    def test_pole_error_names_nearest(self):
        m = Interval(math.pi)
        with pytest.raises(GreensPoleError) as err:
            greens_function(m, IntervalDirichlet(), 0.3, 0.7, 4.0)
        assert err.value.nearest == pytest.approx(4.0, abs=1e-9)

    def test_half_line_continuum_excluded(self):
        with pytest.raises(GreensPoleError):
            greens_function(HalfLine(), HalfLineRobin(0.5), 1.0, 2.0, 3.0)

    def test_pole_structure_residue(self):
        # (lam_n - lam) g -> e_n(x) conj(e_n(y)) as lam -> lam_n
        m = Interval(math.pi)
        lam_n = 4.0
        x, y = 0.9, 2.1
        e = math.sqrt(2 / math.pi)
        target = e * math.sin(2 * x) * e * math.sin(2 * y)
        vals = []
        for d in (1e-4, 1e-5):
            lam = lam_n - d
            vals.append((lam_n - lam) * greens_function(m, IntervalDirichlet(), x, y, lam))
        # Richardson in d
        extrap = (10 * vals[1] - vals[0]) / 9
        assert extrap.real == pytest.approx(target, rel=1e-6)


class TestResolventApply:
    def test_dirichlet_constant_source(self):
        m = Interval(1.0)
        xs = np.linspace(0.05, 0.95, 13)
        u = resolvent_apply(m, IntervalDirichlet(), lambda y: np.ones_like(y), (0.0, 1.0), 0.0, xs)
        assert np.max(np.abs(u - xs * (1 - xs) / 2)) < 1e-13

    def test_zero_source(self):
        m = Interval(1.0)
        xs = np.linspace(0.1, 0.9, 5)
        u = resolvent_apply(m, IntervalDirichlet(), lambda y: np.zeros_like(y), (0.0, 1.0), 1.3, xs)
        assert np.max(np.abs(u)) == 0.0

    def test_eigenmode_source_spectral_identity(self):
        # f = e_n and lam off the spectrum: u = e_n / (lam_n - lam)
        m = Interval(math.pi)
        lam = 2.0 + 0.0j
        n = 2
        f = lambda y: math.sqrt(2 / math.pi) * np.sin(n * y)
        xs = np.linspace(0.2, 3.0, 9)
        u = resolvent_apply(m, IntervalDirichlet(), f, (0.0, math.pi), lam, xs)
        ref = f(xs) / (n * n - lam)
        assert np.max(np.abs(u - ref)) < 1e-12


class TestContinuumDensity:
    def test_extrapolation_matches_closed_form(self):
        for alpha in (0.7, -0.4, math.pi / 2):
            for lam in (0.5, 2.0, 9.0):
                stone = continuum_density(HalfLineRobin(alpha), 0.8, 1.3, lam)
                closed = spectral_density_closed(alpha, 0.8, 1.3, lam)
                assert stone == pytest.approx(closed, rel=1e-7, abs=1e-12)

    def test_diagonal_nonnegative(self):
        for lam in (0.3, 1.7, 6.0):
            assert continuum_density(HalfLineRobin(-0.6), 1.1, 1.1, lam) >= 0

    def test_symmetric_in_points(self):
        d1 = continuum_density(HalfLineRobin(0.4), 0.5, 2.0, 3.0)
        d2 = continuum_density(HalfLineRobin(0.4), 2.0, 0.5, 3.0)
        assert d1 == pytest.approx(d2, rel=1e-12)

    def test_completeness_trend(self):
        # <f, E([0, Lam]) f> + |<psi_b, f>|^2 increases to ||f||^2
        from staticwave.evolution import assemble_data, build_basis, solve
        from staticwave.geometry import HalfLine
        from staticwave.evolution import make_bump

        m = HalfLine()
        ext = HalfLineRobin(-math.pi / 4)
        data = assemble_data(m, [make_bump(1.5, 0.25, 1.0, manifold=m)], points=33)
        fractions = []
        norm = data.norms_sq()[0]
        for kmax in (20.0, 60.0, 180.0):
            sol = solve(m, ext, data, k_max=kmax, t_max=0.5)
            mass = float(np.sum(sol.basis.weights * np.abs(sol.coefficients.c) ** 2))
            fractions.append(mass / norm)
        assert fractions[0] < fractions[1] < fractions[2] <= 1 + 1e-9
        assert fractions[-1] == pytest.approx(1.0, abs=1e-6)
