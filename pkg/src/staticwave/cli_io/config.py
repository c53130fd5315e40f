"""Scenario configuration: a JSON key-value tree, validated with field paths."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from ..evolution import Bump, ModeComponent
from ..extensions import (
    CircleClosure,
    DirectSum,
    Extension,
    HalfLineRobin,
    IntervalDirichlet,
    IntervalFirstKind,
    IntervalSecondKind,
    MassShift,
    canonicalize,
)
from ..geometry import Circle, DisjointHalfLines, HalfLine, Interval, Manifold

__all__ = ["ConfigError", "ScenarioConfig", "parse_config", "load_config", "canonical_dict"]


class ConfigError(ValueError):
    """Invalid scenario configuration; `path` names the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _need(d: dict, key: str, path: str):
    if key not in d:
        raise ConfigError(f"{path}.{key}", "missing required field")
    return d[key]


def _number(value, path: str, positive=False) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(path, f"expected a number, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(path, f"must be positive, got {value}")
    return float(value)


def _complex(value, path: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        return complex(value[0], value[1])
    raise ConfigError(path, f"expected a number or [re, im] pair, got {value!r}")


def _parse_manifold(d, path="manifold") -> Manifold:
    if not isinstance(d, dict):
        raise ConfigError(path, "expected an object")
    kind = _need(d, "kind", path)
    if kind == "circle":
        return Circle(_number(_need(d, "circumference", path), f"{path}.circumference", positive=True))
    if kind == "half_line":
        return HalfLine()
    if kind == "interval":
        return Interval(_number(_need(d, "length", path), f"{path}.length", positive=True))
    if kind == "disjoint_half_lines":
        count = _need(d, "count", path)
        if not isinstance(count, int) or count < 1:
            raise ConfigError(f"{path}.count", f"expected a positive integer, got {count!r}")
        return DisjointHalfLines(count)
    raise ConfigError(f"{path}.kind", f"unknown manifold kind {kind!r}")


def _parse_extension(d, path="extension") -> Extension:
    if not isinstance(d, dict):
        raise ConfigError(path, "expected an object")
    kind = _need(d, "kind", path)
    if kind == "circle_closure":
        return CircleClosure()
    if kind == "robin":
        alpha = _number(_need(d, "alpha", path), f"{path}.alpha")
        if not (-math.pi / 2 < alpha <= math.pi / 2):
            raise ConfigError(f"{path}.alpha", f"must lie in (-pi/2, pi/2], got {alpha}")
        return HalfLineRobin(alpha)
    if kind == "dirichlet":
        return IntervalDirichlet()
    if kind == "first_kind":
        return IntervalFirstKind(
            _number(_need(d, "theta11", path), f"{path}.theta11"),
            _number(_need(d, "theta22", path), f"{path}.theta22"),
            _complex(d.get("theta12", 0.0), f"{path}.theta12"),
        )
    if kind == "second_kind":
        ext = IntervalSecondKind(
            _complex(_need(d, "w1", path), f"{path}.w1"),
            _complex(_need(d, "w2", path), f"{path}.w2"),
            _number(_need(d, "theta", path), f"{path}.theta"),
        )
        return canonicalize(ext)
    if kind == "mass_shift":
        mu = _number(_need(d, "mu", path), f"{path}.mu")
        if mu < 0:
            raise ConfigError(f"{path}.mu", f"must be >= 0, got {mu}")
        return MassShift(_parse_extension(_need(d, "inner", path), f"{path}.inner"), mu)
    if kind == "direct_sum":
        comps = _need(d, "components", path)
        if not isinstance(comps, list) or not comps:
            raise ConfigError(f"{path}.components", "expected a nonempty list")
        return DirectSum(
            tuple(_parse_extension(c, f"{path}.components[{i}]") for i, c in enumerate(comps))
        )
    raise ConfigError(f"{path}.kind", f"unknown extension kind {kind!r}")


def _parse_data(items, path="data"):
    if not isinstance(items, list):
        raise ConfigError(path, "expected a list of data components")
    out = []
    for i, d in enumerate(items):
        p = f"{path}[{i}]"
        if not isinstance(d, dict):
            raise ConfigError(p, "expected an object")
        kind = _need(d, "kind", p)
        target = d.get("target", "phi0")
        if target not in ("phi0", "phidot0"):
            raise ConfigError(f"{p}.target", f"must be phi0 or phidot0, got {target!r}")
        comp = d.get("component", 0)
        if not isinstance(comp, int) or comp < 0:
            raise ConfigError(f"{p}.component", f"expected a nonnegative integer, got {comp!r}")
        amp = _complex(d.get("amplitude", 1.0), f"{p}.amplitude")
        if kind == "bump":
            out.append(
                Bump(
                    _number(_need(d, "center", p), f"{p}.center"),
                    _number(_need(d, "halfwidth", p), f"{p}.halfwidth", positive=True),
                    amp,
                    target,
                    comp,
                )
            )
        elif kind == "mode":
            index = _need(d, "index", p)
            if not isinstance(index, int) or index < 0:
                raise ConfigError(f"{p}.index", f"expected a nonnegative integer, got {index!r}")
            out.append(ModeComponent(index, amp, target, comp))
        else:
            raise ConfigError(f"{p}.kind", f"unknown data kind {kind!r}")
    return out


@dataclass(frozen=True)
class ScenarioConfig:
    manifold: Manifold
    extension: Extension
    data_components: tuple
    t_start: float
    t_stop: float
    t_steps: int
    points: int
    solver: str
    max_modes: int
    parseval_tol: float
    k_max: float | None
    fd_resolution: int
    fd_courant: float
    output_dir: str
    expect_edge_leakage: bool = False
    raw: dict = field(default_factory=dict, compare=False)

    @property
    def times(self):
        import numpy as np

        return np.linspace(self.t_start, self.t_stop, self.t_steps)


def parse_config(d: dict) -> ScenarioConfig:
    manifold = _parse_manifold(_need(d, "manifold", "config"))
    extension = _parse_extension(_need(d, "extension", "config"))
    data = _parse_data(d.get("data", []))
    time_d = d.get("time", {})
    if not isinstance(time_d, dict):
        raise ConfigError("time", "expected an object")
    t_start = _number(time_d.get("start", 0.0), "time.start")
    t_stop = _number(time_d.get("stop", 1.0), "time.stop")
    steps = time_d.get("steps", 11)
    if not isinstance(steps, int) or steps < 1:
        raise ConfigError("time.steps", f"expected a positive integer, got {steps!r}")
    if t_stop < t_start:
        raise ConfigError("time.stop", "must be >= time.start")
    space_d = d.get("space", {})
    points = space_d.get("points", 257) if isinstance(space_d, dict) else None
    if not isinstance(points, int) or points < 8:
        raise ConfigError("space.points", f"expected an integer >= 8, got {points!r}")
    solver = d.get("solver", "spectral")
    if solver not in ("spectral", "fd", "both"):
        raise ConfigError("solver", f"must be spectral, fd or both, got {solver!r}")
    trunc = d.get("truncation", {})
    if not isinstance(trunc, dict):
        raise ConfigError("truncation", "expected an object")
    max_modes = trunc.get("max_modes", 512)
    if not isinstance(max_modes, int) or max_modes < 1:
        raise ConfigError("truncation.max_modes", f"expected a positive integer, got {max_modes!r}")
    parseval_tol = _number(trunc.get("parseval_tol", 1e-8), "truncation.parseval_tol", positive=True)
    k_max = trunc.get("k_max")
    if k_max is not None:
        k_max = _number(k_max, "truncation.k_max", positive=True)
    fd_d = d.get("fd", {})
    if not isinstance(fd_d, dict):
        raise ConfigError("fd", "expected an object")
    fd_resolution = fd_d.get("resolution", 512)
    if not isinstance(fd_resolution, int) or fd_resolution < 8:
        raise ConfigError("fd.resolution", f"expected an integer >= 8, got {fd_resolution!r}")
    fd_courant = _number(fd_d.get("courant", 0.9), "fd.courant", positive=True)
    if fd_courant > 0.9:
        raise ConfigError("fd.courant", f"stability requires <= 0.9, got {fd_courant}")
    expect_leak = bool(d.get("expect_edge_leakage", False))
    out_dir = d.get("output_dir", "out")
    if not isinstance(out_dir, str):
        raise ConfigError("output_dir", "expected a string")
    return ScenarioConfig(
        manifold=manifold,
        extension=extension,
        data_components=tuple(data),
        t_start=t_start,
        t_stop=t_stop,
        t_steps=steps,
        points=points,
        solver=solver,
        max_modes=max_modes,
        parseval_tol=parseval_tol,
        k_max=k_max,
        fd_resolution=fd_resolution,
        fd_courant=fd_courant,
        output_dir=out_dir,
        expect_edge_leakage=expect_leak,
        raw=d,
    )


def load_config(path: str | Path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(str(path), f"invalid JSON: {exc}") from exc
    return parse_config(d)


def _fmt(x: float) -> float:
    return float(f"{x:.17g}")


def canonical_dict(cfg: ScenarioConfig) -> dict:
    """Round-trippable plain-dict form of the resolved configuration."""

    def man(m):
        if isinstance(m, Circle):
            return {"kind": "circle", "circumference": _fmt(m.circumference)}
        if isinstance(m, HalfLine):
            return {"kind": "half_line"}
        if isinstance(m, Interval):
            return {"kind": "interval", "length": _fmt(m.length)}
        return {"kind": "disjoint_half_lines", "count": m.count}

    def ext(e):
        if isinstance(e, CircleClosure):
            return {"kind": "circle_closure"}
        if isinstance(e, HalfLineRobin):
            return {"kind": "robin", "alpha": _fmt(e.alpha)}
        if isinstance(e, IntervalDirichlet):
            return {"kind": "dirichlet"}
        if isinstance(e, IntervalFirstKind):
            return {
                "kind": "first_kind",
                "theta11": _fmt(e.theta11),
                "theta22": _fmt(e.theta22),
                "theta12": [_fmt(e.theta12.real), _fmt(e.theta12.imag)],
            }
        if isinstance(e, IntervalSecondKind):
            return {
                "kind": "second_kind",
                "w1": [_fmt(e.w1.real), _fmt(e.w1.imag)],
                "w2": [_fmt(e.w2.real), _fmt(e.w2.imag)],
                "theta": _fmt(e.theta),
            }
        if isinstance(e, MassShift):
            return {"kind": "mass_shift", "mu": _fmt(e.mu), "inner": ext(e.inner)}
        return {"kind": "direct_sum", "components": [ext(c) for c in e.components]}

    def datum(c):
        if isinstance(c, Bump):
            return {
                "kind": "bump",
                "target": c.target,
                "component": c.component,
                "center": _fmt(c.center),
                "halfwidth": _fmt(c.halfwidth),
                "amplitude": [_fmt(complex(c.amplitude).real), _fmt(complex(c.amplitude).imag)],
            }
        return {
            "kind": "mode",
            "target": c.target,
            "component": c.component,
            "index": c.index,
            "amplitude": [_fmt(complex(c.amplitude).real), _fmt(complex(c.amplitude).imag)],
        }

    return {
        "manifold": man(cfg.manifold),
        "extension": ext(cfg.extension),
        "data": [datum(c) for c in cfg.data_components],
        "time": {"start": _fmt(cfg.t_start), "stop": _fmt(cfg.t_stop), "steps": cfg.t_steps},
        "space": {"points": cfg.points},
        "solver": cfg.solver,
        "truncation": {
            "max_modes": cfg.max_modes,
            "parseval_tol": _fmt(cfg.parseval_tol),
            **({"k_max": _fmt(cfg.k_max)} if cfg.k_max is not None else {}),
        },
        "fd": {"resolution": cfg.fd_resolution, "courant": _fmt(cfg.fd_courant)},
        "expect_edge_leakage": cfg.expect_edge_leakage,
        "output_dir": cfg.output_dir,
    }
