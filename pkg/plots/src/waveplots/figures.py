"""The three figure kinds: snapshot grids, conserved series, spacetime maps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .readers import RunData, load_run

__all__ = ["PlotRequest", "RenderResult", "render", "FIGURE_KINDS"]

FIGURE_KINDS = ("snapshots", "conserved", "spacetime")


@dataclass(frozen=True)
class PlotRequest:
    input_dir: str
    kind: str  # snapshots | conserved | spacetime
    output_path: str

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"kind must be one of {FIGURE_KINDS}, got {self.kind!r}")


@dataclass(frozen=True)
class RenderResult:
    path: Path
    overlays: tuple[str, ...] = field(default=())


def _component_frames(df):
    if "component" in df.columns:
        for comp, sub in df.groupby("component"):
            yield int(comp), sub
    else:
        yield 0, df


def _fig_snapshots(run: RunData):
    df = run.snapshots
    times = sorted(df["t"].unique())
    if not times:
        raise ValueError("snapshot table has no rows; nothing to draw")
    n_show = min(len(times), 8)
    picks = [times[int(round(i * (len(times) - 1) / max(n_show - 1, 1)))] for i in range(n_show)]
    comps = sorted({c for c, _ in _component_frames(df)})
    fig, axes = plt.subplots(
        len(comps), 1, figsize=(8, 3 * len(comps)), squeeze=False, sharex=False
    )
    cmap = plt.get_cmap("viridis")
    for row, comp in enumerate(comps):
        ax = axes[row][0]
        sub_c = df[df["component"] == comp] if "component" in df.columns else df
        for i, t in enumerate(picks):
            sub = sub_c[sub_c["t"] == t]
            amp = np.hypot(sub["phi_re"], sub["phi_im"])
            ax.plot(sub["x"], amp, color=cmap(i / max(n_show - 1, 1)), label=f"t={t:g}")
        ax.set_xlabel("x")
        ax.set_ylabel(r"$|\varphi|$" + (f"  (component {comp})" if len(comps) > 1 else ""))
        ax.legend(loc="upper right", fontsize=8, ncols=2)
    fig.suptitle("field snapshots")
    fig.tight_layout()
    return fig, ()


def _fig_conserved(run: RunData):
    df = run.conserved
    if df.empty:
        raise ValueError("conserved table has no rows; nothing to draw")
    fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
    panels = [
        ("energy", axes[0][0], "energy form E(t)"),
        ("symplectic", axes[0][1], r"symplectic form $\sigma$(t)"),
        ("leakage", axes[1][0], "leakage outside J(K)"),
        ("phi_norm", axes[1][1], r"$\Vert\varphi_t\Vert$"),
    ]
    for col, ax, title in panels:
        ax.plot(df["t"], df[col], lw=1.5)
        ax.set_title(title, fontsize=10)
        ax.set_xlabel("t")
        if col == "leakage" and (df[col] > 0).any():
            ax.set_yscale("symlog", linthresh=1e-12)
    fig.tight_layout()
    return fig, ()


def _cone_edges(run: RunData, t: np.ndarray):
    """Left/right edges of the causal slice of the data support, per time."""
    pieces = [p for p in run.support_pieces if p[0] == 0]
    if not pieces:
        return None
    lo = min(p[1] for p in pieces)
    hi = max(p[2] for p in pieces)
    return lo - np.abs(t), hi + np.abs(t)


def _fig_spacetime(run: RunData):
    df = run.snapshots
    comp0 = next(sub for _, sub in _component_frames(df))
    times = np.array(sorted(comp0["t"].unique()))
    if times.size == 0:
        raise ValueError("snapshot table has no rows; nothing to draw")
    xs = np.array(sorted(comp0["x"].unique()))
    grid = np.full((len(times), len(xs)), np.nan)
    t_index = {t: i for i, t in enumerate(times)}
    x_index = {x: j for j, x in enumerate(xs)}
    amp = np.hypot(comp0["phi_re"], comp0["phi_im"])
    for t, x, a in zip(comp0["t"], comp0["x"], amp):
        grid[t_index[t], x_index[x]] = a

    fig, ax = plt.subplots(figsize=(8, 6))
    mesh = ax.pcolormesh(xs, times, grid, shading="nearest", cmap="magma")
    fig.colorbar(mesh, ax=ax, label=r"$|\varphi|$")
    overlays = []
    edges = _cone_edges(run, times)
    if edges is not None:
        left, right = edges
        ax.plot(np.clip(left, xs.min(), xs.max()), times, "w--", lw=1.5, label="J(K) cone")
        ax.plot(np.clip(right, xs.min(), xs.max()), times, "w--", lw=1.5)
        overlays.append("cone")
    t_inf = run.t_infinity
    if t_inf is not None and math.isfinite(t_inf) and times.min() <= t_inf <= times.max():
        ax.axhline(t_inf, color="cyan", lw=1.2, ls=":", label=r"$t^{\infty}(K)$")
        overlays.append("t_infinity")
    if overlays:
        ax.legend(loc="upper right", fontsize=9)
    ax.set_xlabel("x")
    ax.set_ylabel("t")
    ax.set_title("spacetime amplitude with causal overlays")
    fig.tight_layout()
    return fig, tuple(overlays)


def render(request: PlotRequest) -> RenderResult:
    """Render one figure; raises before writing anything on bad inputs."""
    run = load_run(
        request.input_dir,
        need_snapshots=request.kind in ("snapshots", "spacetime"),
        need_conserved=request.kind == "conserved",
    )
    builder = {
        "snapshots": _fig_snapshots,
        "conserved": _fig_conserved,
        "spacetime": _fig_spacetime,
    }[request.kind]
    fig, overlays = builder(run)
    out = Path(request.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return RenderResult(out, overlays)
