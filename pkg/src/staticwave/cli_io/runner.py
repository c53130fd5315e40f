"""Run orchestration: simulate, spectrum, greens tabulation and verification."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .. import __version__
from ..evolution import (
    FieldState,
    Solution,
    assemble_data,
    build_basis,
    check_composition,
    check_pythagoras,
    solve,
)
from ..extensions import classify
from ..geometry import Circle, HalfLine, coordinate_sup, t_infinity, t_ladder
from ..observables import (
    canonical_partner,
    conserved_series,
    leakage,
    symmetry_defects,
)
from ..oracle_fd import FDGrid, convergence_order, fd_evolve
from ..spectral import eigenvalue_condition, zero_in_spectrum
from .config import ScenarioConfig, canonical_dict
from .outputs import (
    content_hash,
    is_disjoint,
    write_conserved_csv,
    write_greens_csv,
    write_meta,
    write_snapshots_csv,
    write_spectrum_csv,
)

__all__ = ["prepare_solution", "run_simulate", "run_spectrum", "run_greens", "run_verify", "verify_battery"]


def prepare_solution(cfg: ScenarioConfig) -> Solution:
    m, ext = cfg.manifold, cfg.extension
    basis = build_basis(m, ext, cfg.max_modes)
    data = assemble_data(m, list(cfg.data_components), cfg.points, basis)
    t_max = max(abs(cfg.t_start), abs(cfg.t_stop), 1.0)
    return solve(
        m,
        ext,
        data,
        max_modes=cfg.max_modes,
        parseval_tol=cfg.parseval_tol,
        t_max=t_max,
        k_max=cfg.k_max,
    )


def _geometry_meta(cfg: ScenarioConfig, sol: Solution) -> dict:
    out: dict = {}
    data = sol.data
    if data.support is not None:
        t_inf = t_infinity(cfg.manifold, data.support)
        out["support"] = [[c, lo, hi] for c, lo, hi in data.support.pieces]
        out["t_infinity"] = t_inf if math.isfinite(t_inf) else "inf"
        out["t_ladder"] = [
            t_ladder(cfg.manifold, data.support, n) if math.isfinite(t_inf) else "inf"
            for n in range(5)
        ]
    return out


def _fd_states(cfg: ScenarioConfig, times) -> list[FieldState]:
    m, ext = cfg.manifold, cfg.extension
    basis = build_basis(m, ext, cfg.max_modes)
    data = assemble_data(m, list(cfg.data_components), cfg.points, basis)
    length = coordinate_sup(m)
    h = (length if math.isfinite(length) else 1.0) / cfg.fd_resolution
    grid = FDGrid(h, cfg.fd_courant)
    times = np.asarray(times, dtype=float)
    neg = times[times < 0]
    pos = times[times >= 0]
    states: list[FieldState] = []
    if len(neg):
        states.extend(fd_evolve(m, ext, data, neg, grid))
    if len(pos):
        states.extend(fd_evolve(m, ext, data, pos, grid))
    states.sort(key=lambda s: s.t)
    return states


def _solver_comparison(sol: Solution, fd_states: list[FieldState], x_view: float) -> dict:
    diffs = []
    for st in fd_states:
        total = 0.0
        for comp, grid in enumerate(st.grids):
            sel = grid <= x_view
            xs = grid[sel]
            if len(xs) < 2:
                continue
            ref = sol.eval_phi(st.t, comp, xs)
            h = float(xs[1] - xs[0])
            total += h * float(np.sum(np.abs(st.phi[comp][: len(xs)] - ref) ** 2))
        diffs.append(math.sqrt(total))
    return {
        "l2_difference_per_time": diffs,
        "l2_difference_max": max(diffs) if diffs else 0.0,
    }


def run_simulate(cfg: ScenarioConfig, out_dir: str | Path | None = None) -> dict:
    """Write meta.json, spectrum.csv, snapshots.csv, conserved.csv (and the
    FD snapshot file under --solver fd/both)."""
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    sol = prepare_solution(cfg)
    times = cfg.times
    blobs = []
    blobs.append(write_spectrum_csv(out / "spectrum.csv", _spectrum_for_csv(cfg)))

    meta: dict = {
        "version": __version__,
        "config": canonical_dict(cfg),
        "solver": cfg.solver,
        "truncation": sol.meta,
        "geometry": _geometry_meta(cfg, sol),
        "classification": classify(cfg.manifold, cfg.extension).value.value,
    }

    if cfg.solver in ("spectral", "both"):
        states = [sol.state(t) for t in times]
        blobs.append(write_snapshots_csv(out / "snapshots.csv", states, is_disjoint(cfg.manifold)))
        series = conserved_series(sol, times)
        blobs.append(
            write_conserved_csv(
                out / "conserved.csv", times, series.energy, series.symplectic,
                series.leakage, series.phi_norm,
            )
        )
        meta["drift"] = {
            "energy": series.energy_drift,
            "symplectic": series.symplectic_drift,
        }
    if cfg.solver in ("fd", "both"):
        fd_states = _fd_states(cfg, times)
        name = "snapshots_fd.csv" if cfg.solver == "both" else "snapshots.csv"
        blobs.append(write_snapshots_csv(out / name, fd_states, is_disjoint(cfg.manifold)))
        meta.setdefault("fd", {})["resolution"] = cfg.fd_resolution
        if cfg.solver == "both":
            x_view = coordinate_sup(cfg.manifold)
            if not math.isfinite(x_view):
                x_view = max(float(g[-1]) for g in sol.data.grids)
            meta["solver_comparison"] = _solver_comparison(sol, fd_states, x_view)
    meta["content_hash"] = content_hash(blobs)
    write_meta(out / "meta.json", meta)
    return meta


def _spectrum_for_csv(cfg: ScenarioConfig):
    from ..evolution import _cached_spectrum, _spectrum_cap
    from ..spectral import SpectralData

    spec = _cached_spectrum(cfg.manifold, cfg.extension, _spectrum_cap(cfg.max_modes))
    lines = []
    count = 0
    for line in spec.lines:
        if count >= cfg.max_modes:
            break
        lines.append(line)
        count += len(line.modes)
    return SpectralData(spec.manifold, spec.extension, tuple(lines), spec.continuum)


def run_spectrum(cfg: ScenarioConfig, out_dir: str | Path | None = None) -> dict:
    """Write spectrum.csv plus the zero-mode criterion and classification."""
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    spec_data = _spectrum_for_csv(cfg)
    blob = write_spectrum_csv(out / "spectrum.csv", spec_data)
    cls = classify(cfg.manifold, cfg.extension)
    meta = {
        "version": __version__,
        "config": canonical_dict(cfg),
        "classification": cls.value.value,
        "spectrum_floor": cls.spectrum_floor,
        "zero_in_spectrum": zero_in_spectrum(cfg.manifold, cfg.extension),
        "eigenvalue_count": len(spec_data.lines),
        "content_hash": content_hash([blob]),
    }
    write_meta(out / "meta.json", meta)
    return meta


def run_greens(cfg: ScenarioConfig, lam: complex, points: int = 33, out_dir: str | Path | None = None) -> dict:
    """Tabulate the resolvent kernel on a points x points grid."""
    from ..spectral import greens_function

    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    m = cfg.manifold
    sup = coordinate_sup(m)
    hi = sup if math.isfinite(sup) else 10.0
    xs = np.linspace(hi / (points + 1), hi * (1 - 1 / (points + 1)), points)
    rows = []
    for x in xs:
        vals = greens_function(m, cfg.extension, float(x), xs, lam)
        vals = np.atleast_1d(vals)
        for y, g in zip(xs, vals):
            rows.append((float(x), float(y), lam.real, lam.imag, float(np.real(g)), float(np.imag(g))))
    blob = write_greens_csv(out / "greens.csv", rows)
    meta = {
        "version": __version__,
        "config": canonical_dict(cfg),
        "lambda": [lam.real, lam.imag],
        "content_hash": content_hash([blob]),
    }
    write_meta(out / "meta.json", meta)
    return meta


# ---------------------------------------------------------------------------
# verification battery


def _check(name, value, tolerance, comparator="le"):
    ok = value <= tolerance if comparator == "le" else value >= tolerance
    return {
        "check": name,
        "value": float(value),
        "tolerance": float(tolerance),
        "comparator": comparator,
        "pass": bool(ok),
    }


def verify_battery(cfg: ScenarioConfig, sol: Solution, fast: bool = True) -> list[dict]:
    """The per-scenario invariant checks with their pinned tolerances."""
    m, ext = cfg.manifold, cfg.extension
    checks: list[dict] = []
    zero_data = not any(np.any(np.abs(p) > 0) for p in sol.data.phi0 + sol.data.phidot0)

    # eigenvalue-condition residuals on the discrete spectrum
    resid = 0.0
    lams = sol.coefficients.lams[: sol.coefficients.n_discrete]
    for lam in lams:
        if abs(lam) < 1e-9:
            continue
        local = abs(eigenvalue_condition(m, ext, float(lam) + 0.3 * (1 + abs(lam))))
        resid = max(resid, abs(eigenvalue_condition(m, ext, float(lam))) / max(local, 1e-9))
    checks.append(_check("eigenvalue_residuals", resid, 1e-9))

    # orthonormality of the leading modes
    checks.append(_check("mode_orthonormality", _gram_defect(sol), 1e-8))

    # Parseval bookkeeping (the measured defect floors at quadrature roundoff)
    checks.append(
        _check("parseval_defect", sol.coefficients.parseval_defect, max(cfg.parseval_tol, 5e-12))
    )

    if not zero_data:
        span = max(abs(cfg.t_stop), 1.0)
        kw = dict(max_modes=cfg.max_modes, parseval_tol=cfg.parseval_tol, k_max=cfg.k_max, t_max=span)
        data = sol.data
        checks.append(_check("composition", check_composition(m, ext, data, 0.3, 0.4, **kw), 1e-8))
        checks.append(_check("pythagoras", check_pythagoras(m, ext, data, 0.4, **kw), 1e-8))
        series = conserved_series(sol, cfg.times)
        checks.append(_check("energy_drift", series.energy_drift, 1e-8))
        checks.append(_check("symplectic_drift", series.symplectic_drift, 1e-8))
        sym = symmetry_defects(sol, canonical_partner(sol), np.linspace(0.1, max(cfg.t_stop, 1.0), 10))
        for key, val in sym.items():
            checks.append(_check(f"symmetry_{key}", val, 1e-8))
        checks.extend(_support_checks(cfg, sol))
        if not fast:
            checks.extend(_fd_checks(cfg, sol))
    else:
        checks.append(_check("zero_data_vacuous", 0.0, 1.0))
    return checks


def _gram_defect(sol: Solution) -> float:
    from ..quadrature import piecewise_rule
    from ..evolution import _panel_cap

    m = sol.manifold
    defect = 0.0
    for b in sol.basis.blocks:
        if not hasattr(b, "modes"):
            continue
        n = min(len(b.modes), 25)
        if n == 0:
            continue
        sup = coordinate_sup(m)
        hi = sup if math.isfinite(sup) else 60.0
        k_hi = math.sqrt(abs(float(np.max(b.lams[:n]))))
        xs, ws = piecewise_rule([(0.0, hi)], _panel_cap(m), k_hi)
        V = np.vstack([np.asarray(mode(xs), dtype=complex) for mode in b.modes[:n]])
        gram = np.conj(V) @ (ws[:, None] * V.T)
        defect = max(defect, float(np.max(np.abs(gram - np.eye(n)))))
    return defect


def _support_checks(cfg: ScenarioConfig, sol: Solution) -> list[dict]:
    checks = []
    data = sol.data
    if data.support is None:
        return checks
    t_inf = t_infinity(cfg.manifold, data.support)
    h = float(data.grids[0][1] - data.grids[0][0])
    if math.isfinite(t_inf):
        window = t_inf - 2 * h
    else:
        window = max(abs(cfg.t_start), abs(cfg.t_stop), 1.0)
    if window > 0:
        worst = 0.0
        for t in np.linspace(-window, window, 7):
            worst = max(worst, leakage(sol, float(t)))
        checks.append(_check("support_leakage", worst, 1e-6))
    if cfg.expect_edge_leakage and math.isfinite(t_inf):
        lo0 = min(lo for _, lo, hi in data.support.pieces)
        sup = coordinate_sup(cfg.manifold)
        hi0 = max(hi for _, lo, hi in data.support.pieces)
        t_reach = min(lo0, (sup - hi0) if math.isfinite(sup) else math.inf)
        t_far = max(lo0, (sup - hi0) if math.isfinite(sup) else 0.0)
        lo_t, hi_t = t_reach + 0.05 * t_inf, min(t_far - 0.05 * t_inf, cfg.t_stop)
        best = 0.0
        for t in np.linspace(lo_t, max(hi_t, lo_t), 5):
            best = max(best, leakage(sol, float(t)))
        checks.append(_check("edge_leakage_detected", best, 1e-3, comparator="ge"))
    return checks


def _fd_checks(cfg: ScenarioConfig, sol: Solution) -> list[dict]:
    m, ext = cfg.manifold, cfg.extension
    t_cmp = min(0.5, cfg.t_stop) if cfg.t_stop > 0 else 0.5
    length = coordinate_sup(m)
    base_h = length if math.isfinite(length) else 1.0
    errors = {}
    for p in (cfg.fd_resolution // 4, cfg.fd_resolution // 2, cfg.fd_resolution):
        h = base_h / p
        st = fd_evolve(m, ext, sol.data, [t_cmp], FDGrid(h, cfg.fd_courant))[0]
        total = 0.0
        for comp, grid in enumerate(st.grids):
            x_view = length if math.isfinite(length) else max(float(g[-1]) for g in sol.data.grids)
            xs = grid[grid <= x_view]
            ref = sol.eval_phi(t_cmp, comp, xs)
            total += h * float(np.sum(np.abs(st.phi[comp][: len(xs)] - ref) ** 2))
        errors[h] = math.sqrt(total)
    order = convergence_order(errors)
    return [
        _check("fd_l2_difference", errors[base_h / cfg.fd_resolution], 1e-3),
        _check("fd_order_low", order, 1.7, comparator="ge"),
        _check("fd_order_high", order, 2.3),
    ]


def run_verify(cfg: ScenarioConfig, out_dir: str | Path | None = None, fast: bool = True) -> dict:
    """Run the invariant battery and write a machine-readable report."""
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    sol = prepare_solution(cfg)
    checks = verify_battery(cfg, sol, fast=fast)
    report = {
        "version": __version__,
        "config": canonical_dict(cfg),
        "checks": checks,
        "passed": all(c["pass"] for c in checks),
    }
    write_meta(out / "verify.json", report)
    return report
